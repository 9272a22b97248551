//! Exact algebra for superspecial trigonal curves of genus 5 given by
//! singular quintic plane models over small finite fields.

pub mod ff;
pub mod mpoly;
pub mod parse;
pub mod groebner;
pub mod quintic;
pub mod hasse_witt;
pub mod catalog;
pub mod irreducibility;
pub mod enumerator;
pub mod classify;

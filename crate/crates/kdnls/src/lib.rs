//! Darboux-transformation engine for the Kundu-type derivative nonlinear
//! Schrödinger equation
//! `iQₜ + Qₓₓ + iα(Q²Q*)ₓ − (θₜ + θₓ²)Q + θₓ(2iQₓ − αQ²Q*) = 0`.

pub mod catalog;
pub mod cli;
pub mod darboux;
pub mod lax;
pub mod numerics;
pub mod verify;

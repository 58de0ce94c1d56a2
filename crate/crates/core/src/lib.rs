//! Local-global principle for diagonal quadratic forms on Mordell-Weil type
//! groups: S-units of Q and rational points of elliptic curves over Q.
//!
//! * [`arith`] exact integer primitives.
//! * [`qforms`] rational diagonal forms, Hilbert symbols, Holzer witnesses.
//! * [`groups`] the two group backends and their reduction maps.
//! * [`localglobal`] local tests, global deciders, scans and probes.

pub mod arith;
pub mod qforms;
pub mod groups;
pub mod localglobal;

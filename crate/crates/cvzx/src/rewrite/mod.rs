//! Rewrite engine (to come).

//! Normal forms (to come).

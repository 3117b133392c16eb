//! Protocol reproductions (to come).

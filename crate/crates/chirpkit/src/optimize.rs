//! Robust-rotation optimization.

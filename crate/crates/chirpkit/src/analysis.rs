//! Figure-level analyses: sweeps, adiabatic traces, benchmarking.

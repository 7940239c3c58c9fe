//! Process tomography.

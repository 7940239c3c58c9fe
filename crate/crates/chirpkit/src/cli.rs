//! Batch front-end: configuration, commands, file formats.

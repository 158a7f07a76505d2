//! Compressed-domain motion toolkit.
//!
//! Extracts motion vectors and intra-coded-macroblock masks straight from
//! H.264 elementary streams (or from sidecar dump files for codecs the
//! native parser does not cover), rasterizes them into dense per-frame
//! motion fields, and feeds them through a preprocessing / augmentation
//! pipeline into a small two-stream classifier. An evaluation kit covers
//! cross-forgery accuracy matrices, end-point-error against ground-truth
//! optical flow, and a FLOP cost model for the motion input path.

pub mod bitparse;
pub mod evalkit;
pub mod ingest;
pub mod motionfield;
pub mod net;
pub mod pipeline;

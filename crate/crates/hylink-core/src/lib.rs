//! Link-level models for indoor hybrid RF + visible-light wireless access.
//!
//! The crate covers the full metric chain of a hybrid indoor deployment:
//! Lambertian optical channels and Wi-Fi wideband channels ([`vlc`], [`rf`]),
//! serving-link selection with intra-VLC and vertical handover ([`link`]),
//! the optical-cell MAC with slotted random access and multi-band grants
//! ([`mac`]), electromagnetic-exposure metrics with a layered-skin bioheat
//! solver ([`exposure`]), device energy metrics ([`energy`]), and scripted
//! distance/depth sweeps producing tabular results ([`sweep`]).
//!
//! Everything here is pure computation over immutable parameter bundles;
//! file formats, CSV output, and the CLI live in the companion `hylink-cli`
//! crate. The crate is `no_std`-compatible (`alloc` required): disable the
//! default `std` feature and enable `libm` instead.
//!
//! ```
//! use hylink_core::geom::LinkGeometry;
//! use hylink_core::vlc::{self, VlcApParams, VlcReceiverParams};
//!
//! // a lamp 3 m overhead, default indoor parameters
//! let ap = VlcApParams::default();
//! let rx = VlcReceiverParams::default();
//! let gain = vlc::channel_gain(&LinkGeometry::boresight(3.0), &ap, &rx).unwrap();
//! let sinr = vlc::vlc_sinr(gain, &[], ap.bandwidth_hz, &ap, &rx);
//! let rate = vlc::vlc_rate(ap.bandwidth_hz, sinr);
//! assert!(rate > 100e6); // well above 100 Mbps at short range
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("hylink-core needs either the `std` or the `libm` feature");

extern crate alloc;

pub mod calib;
pub mod energy;
pub mod exposure;
pub mod geom;
pub mod link;
pub mod mac;
mod maths;
pub mod rf;
pub mod scenario;
pub mod sweep;
pub mod vlc;

pub use geom::Point3;
pub use scenario::Scenario;

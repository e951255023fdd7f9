//! Measuring how well DE parameter adaptation methods track a moving target.
//!
//! A parameter adaptation method (PAM) proposes a control parameter for each
//! of `N` individuals per iteration. In the simulation ([`sim`]) each proposal
//! succeeds with a probability that falls linearly with its distance to a
//! target trajectory ([`targets`]), and the PAM adapts on those outcomes
//! exactly as it would inside differential evolution. The mean success rate
//! over a run measures how closely the method follows the target.
//!
//! [`pam`] implements jDE, EPSDE, JADE, MDE and SHADE as interchangeable
//! state machines. [`de`] is a small DE engine driven by the same PAMs, used
//! to check the modelling assumption on real objectives. [`analysis`] holds
//! the statistics, [`plan`] the declarative experiment runner behind the
//! `tpam` binary and [`io`] the CSV formats.
//!
//! ```
//! use tpam::pam::{PamHyper, PamKind};
//! use tpam::sim::{simulate_run, SimConfig};
//! use tpam::targets::TargetSpec;
//!
//! let config = SimConfig { t_max: 100, n: 10, ..SimConfig::default() };
//! let run = simulate_run(PamKind::Shade, &PamHyper::default(), &TargetSpec::LinInc, &config).unwrap();
//! assert!((0.0..=1.0).contains(&run.r_succ));
//! ```

pub mod error;
pub mod pam;
pub mod sim;
pub mod targets;
pub mod de;
pub mod analysis;
pub mod io;
pub mod plan;

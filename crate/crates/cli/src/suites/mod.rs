//! The verification suites. Each builds its own state and returns a panel
//! of report rows.

pub mod counterexample;
pub mod fock;
pub mod gram;
pub mod identities;
pub mod sigma;

use clap::ValueEnum;

use crate::config::RunConfig;
use crate::report::Panel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    VerifyFock,
    VerifySigma,
    CheckIdentities,
    BuildCounterexample,
    GramDefect,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::VerifyFock,
        Suite::VerifySigma,
        Suite::CheckIdentities,
        Suite::BuildCounterexample,
        Suite::GramDefect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::VerifyFock => "verify-fock",
            Suite::VerifySigma => "verify-sigma",
            Suite::CheckIdentities => "check-identities",
            Suite::BuildCounterexample => "build-counterexample",
            Suite::GramDefect => "gram-defect",
        }
    }

    pub fn run(self, cfg: &RunConfig) -> Panel {
        match self {
            Suite::VerifyFock => fock::run(),
            Suite::VerifySigma => sigma::run(),
            Suite::CheckIdentities => identities::run(cfg.trunc),
            Suite::BuildCounterexample => counterexample::run(&cfg.params),
            Suite::GramDefect => gram::run(&cfg.params, &cfg.section_sizes),
        }
    }
}

/// A command line selection: one suite or all of them in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    VerifyFock,
    VerifySigma,
    CheckIdentities,
    BuildCounterexample,
    GramDefect,
    All,
}

impl Command {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            Command::VerifyFock => vec![Suite::VerifyFock],
            Command::VerifySigma => vec![Suite::VerifySigma],
            Command::CheckIdentities => vec![Suite::CheckIdentities],
            Command::BuildCounterexample => vec![Suite::BuildCounterexample],
            Command::GramDefect => vec![Suite::GramDefect],
            Command::All => Suite::ALL.to_vec(),
        }
    }
}

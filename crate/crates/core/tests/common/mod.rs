//! Command-line cases pinned by golden files.

use std::path::{Path, PathBuf};

use surprisal::cli::dispatch;

pub struct Case {
    pub name: &'static str,
    /// Arguments after the program name; `@file` names a fixture input.
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CASES: &[Case] = &[
    Case {
        name: "measures_biased_coin",
        args: &["measures", "@biased_coin.json"],
        exit: 0,
    },
    Case {
        name: "measures_skewed",
        args: &["measures", "@skewed.json"],
        exit: 0,
    },
    Case {
        name: "lorenz_skewed",
        args: &["lorenz", "@skewed.json"],
        exit: 0,
    },
    Case {
        name: "check_reflexive",
        args: &["check", "@skewed.json", "@skewed.json"],
        exit: 0,
    },
    Case {
        name: "check_infeasible",
        args: &["check", "@spread.json", "@peaked.json"],
        exit: 1,
    },
    Case {
        name: "check_approximate",
        args: &["check", "@spread.json", "@peaked.json", "--eps", "0.3"],
        exit: 0,
    },
    Case {
        name: "approx_flat",
        args: &["approx", "@peaked.json", "--mode", "flat", "--eps", "0.05"],
        exit: 0,
    },
    Case {
        name: "approx_steep_csv",
        args: &["approx", "@skewed.json", "--mode", "steep", "--eps", "0.1", "--format", "csv"],
        exit: 0,
    },
    Case {
        name: "smooth_exact",
        args: &["smooth", "@skewed.json", "--eps", "0.1", "--exact"],
        exit: 0,
    },
    Case {
        name: "suffice",
        args: &["suffice", "@point.json", "@spread4.json", "--eps", "0.5"],
        exit: 0,
    },
    Case {
        name: "suffice_fails",
        args: &["suffice", "@spread.json", "@peaked.json", "--eps", "0.1"],
        exit: 1,
    },
    Case {
        name: "bounds_landauer",
        args: &["bounds", "landauer", "@peaked.json"],
        exit: 0,
    },
    Case {
        name: "bounds_landauer_mixed_qubit",
        args: &["bounds", "landauer", "@mixed_qubit.json", "--n-max", "4"],
        exit: 0,
    },
    Case {
        name: "bounds_catalyst",
        args: &["bounds", "catalyst", "--delta", "0.01", "--dim-s", "2", "--dim-e", "3", "--from", "@biased_coin.json"],
        exit: 0,
    },
    Case {
        name: "bounds_production",
        args: &["bounds", "production", "@peaked.json", "@spread.json"],
        exit: 0,
    },
    Case {
        name: "bounds_marginal",
        args: &["bounds", "marginal", "@system.json", "@environment.json", "@joint_final.json"],
        exit: 0,
    },
    Case {
        name: "iid_rate",
        args: &["iid-rate", "@sharp_bit.json", "@soft_bit.json", "--n", "1000", "--eps", "0.1"],
        exit: 0,
    },
    Case {
        name: "spectrum_from_renyi",
        args: &["spectrum-from-renyi", "@renyi3.txt", "--dim", "3"],
        exit: 0,
    },
    Case {
        name: "proptest_monotone",
        args: &["proptest", "--suite", "monotone", "--trials", "100", "--seed", "7"],
        exit: 0,
    },
    Case {
        name: "proptest_weakened",
        args: &["proptest", "--suite", "max-variance", "--trials", "200", "--seed", "3", "--weakened"],
        exit: 1,
    },
    Case {
        name: "proptest_all_csv",
        args: &["proptest", "--trials", "40", "--seed", "1", "--format", "csv"],
        exit: 0,
    },
    Case {
        name: "error_bad_sum",
        args: &["measures", "@bad_sum.json"],
        exit: 2,
    },
    Case {
        name: "error_bad_rank",
        args: &["check", "@bad_rank.json", "@peaked.json"],
        exit: 2,
    },
    Case {
        name: "error_malformed",
        args: &["measures", "@malformed.json"],
        exit: 2,
    },
    Case {
        name: "error_renyi_line",
        args: &["spectrum-from-renyi", "@bad_renyi.txt", "--dim", "3"],
        exit: 2,
    },
    Case {
        name: "error_bad_eps",
        args: &["approx", "@peaked.json", "--mode", "flat", "--eps", "1.5"],
        exit: 2,
    },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    let inputs = golden_dir().join("inputs");
    let argv: Vec<String> = std::iter::once("surprisal".to_string())
        .chain(args.iter().map(|a| match a.strip_prefix('@') {
            Some(name) => inputs.join(name).display().to_string(),
            None => a.to_string(),
        }))
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(argv, &mut out, &mut err);
    // paths in messages are shown relative to the fixture directory
    let prefix = format!("{}/", inputs.display());
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap().replace(&prefix, ""),
    }
}

/// Exit status, stdout and stderr as stored in a golden file.
pub fn transcript(case: &Case) -> String {
    let r = run(case.args);
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", r.code, r.stdout, r.stderr)
}

pub fn golden_path(case: &Case) -> PathBuf {
    golden_dir().join(format!("{}.out", case.name))
}

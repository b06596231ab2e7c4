//! Column schemas, printed by `--schema` and shared with the commands so the
//! two cannot drift apart.

use serde_json::json;

pub const EVAL: &[&str] = &["n", "re", "im", "angle", "exact"];
pub const PRIMESUM: &[&str] = &["a", "re", "im", "abs"];
pub const FOLNER_GEN: &[&str] = &["q", "exponents"];
pub const FOLNER_RATIO: &[&str] = &["p", "ratio", "expected", "equal"];
pub const FOLNER_DECOMPOSE: &[&str] = &[
    "q", "exponents", "a", "w", "u", "r_q", "crt_modulus", "l_q", "m_q", "swapped",
];
pub const FOLNER_VERIFY: &[&str] = &["q", "r_q", "identities", "all_hold", "failed", "brute_r", "brute_equal"];
pub const FOLNER_CLAIMS: &[&str] = &["q", "p", "qp", "outcome", "failed"];
pub const RECUR_SCAN: &[&str] = &["n", "gap", "gap_exact"];
pub const SYS_SCAN: &[&str] = &["n", "p_n", "q_n", "measure"];

/// `(subcommand, default format, columns or record fields)`.
const ENTRIES: &[(&str, &str, &[&str])] = &[
    ("eval", "csv", EVAL),
    ("distance", "jsonl", &["f", "g", "lower", "upper", "distance"]),
    ("logavg", "jsonl", &["f", "x", "progression", "re", "im", "abs", "bound"]),
    ("correlate", "jsonl", &["f", "g", "abcd", "x", "progression", "re", "im", "abs"]),
    (
        "profile",
        "jsonl",
        &["f", "b", "x", "points", "half_width", "resolution", "grid_infimum", "refined", "infimum", "rows"],
    ),
    ("primesum", "csv", PRIMESUM),
    ("folner gen", "csv", FOLNER_GEN),
    ("folner ratio", "csv", FOLNER_RATIO),
    ("folner avg", "jsonl", &["f", "size", "re", "im", "bounds"]),
    ("folner decompose", "csv", FOLNER_DECOMPOSE),
    ("folner verify", "csv", FOLNER_VERIFY),
    ("folner claims", "csv", FOLNER_CLAIMS),
    ("folner corr", "jsonl", &["f", "g", "abcd", "x", "size", "re", "im", "abs"]),
    ("recur criterion", "jsonl", &["criterion", "quad", "normalized"]),
    ("recur scan", "csv", RECUR_SCAN),
    ("recur density", "jsonl", &["f", "eps", "quad", "x", "estimate", "upper", "lower", "hits"]),
    (
        "recur counterexample",
        "jsonl",
        &["case", "quad", "f", "g", "eta", "eta_value", "n0", "slack", "check"],
    ),
    ("recur verify", "jsonl", &["certificate", "from", "to", "minimum", "minimum_value", "argmin", "exact"]),
    (
        "recur fejer",
        "jsonl",
        &[
            "eps", "r", "minimal_r", "grid_error", "meets_bound", "dominated", "min_polynomial",
            "lower_bound_holds", "lower_bound_margin", "coefficients",
        ],
    ),
    ("recur pair", "jsonl", &["certificate", "check", "shift1_minimum", "shift1_argmin", "n"]),
    ("sys build", "jsonl", &["dimension", "coordinates"]),
    ("sys measure", "jsonl", &["p", "q", "measure", "measure_value"]),
    ("sys scan", "csv", SYS_SCAN),
    (
        "sys axioms",
        "jsonl",
        &[
            "trials", "seed", "arc_family", "composition_failures", "measure_failures",
            "composition_witness", "measure_witness", "passed",
        ],
    ),
];

pub fn render() -> String {
    let mut out = String::new();
    for (command, format, columns) in ENTRIES {
        let key = if *format == "csv" { "columns" } else { "fields" };
        out.push_str(&json!({ "command": command, "format": format, key: columns }).to_string());
        out.push('\n');
    }
    out
}

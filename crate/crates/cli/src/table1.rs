//! Tightness study of the embedded Hadamard matrices up to order 20.

use bell_excess::catalog::builtin;
use bell_excess::lhv::LhvConfig;
use bell_excess::tightness::tightness_report;
use bell_excess::Result;
use serde::Serialize;

/// Expected row: label, catalogue key, distinct vertices, affine rank, tight.
pub struct Golden {
    pub label: &'static str,
    pub order: usize,
    pub index: usize,
    pub vertices: usize,
    pub rank: usize,
    pub tight: bool,
}

const fn row(label: &'static str, order: usize, index: usize, vertices: usize, rank: usize, tight: bool) -> Golden {
    Golden {
        label,
        order,
        index,
        vertices,
        rank,
        tight,
    }
}

pub const GOLDEN: [Golden; 12] = [
    row("2", 2, 0, 4, 3, true),
    row("4*", 4, 0, 4, 3, false),
    row("8", 8, 0, 64, 63, true),
    row("12", 12, 0, 2640, 143, true),
    row("16 (1)*", 16, 0, 896, 105, false),
    row("16 (2)*", 16, 1, 192, 81, false),
    row("16 (3)*", 16, 2, 64, 45, false),
    row("16 (4)", 16, 3, 21504, 255, true),
    row("16 (5)", 16, 4, 21504, 255, true),
    row("20 (1)", 20, 0, 20064, 399, true),
    row("20 (2)", 20, 1, 20064, 399, true),
    row("20 (3)", 20, 2, 20064, 399, true),
];

#[derive(Clone, Debug, Serialize)]
pub struct RowResult {
    pub label: &'static str,
    pub m: usize,
    pub lhv_value: String,
    pub vertices: usize,
    pub strategy_pairs: usize,
    pub affine_rank: usize,
    pub tight: bool,
    pub regular_equivalent: bool,
    pub expected_vertices: usize,
    pub expected_rank: usize,
    pub expected_tight: bool,
    pub matches: bool,
}

pub fn run_row(g: &Golden, cfg: &LhvConfig) -> Result<RowResult> {
    let h = builtin(g.order, g.index)?.matrix;
    let r = tightness_report(&h.to_core(), cfg)?;
    let matches = r.vertex_count == g.vertices && r.affine_rank == g.rank && r.tight == g.tight;
    Ok(RowResult {
        label: g.label,
        m: r.m,
        lhv_value: r.lhv_value.to_string(),
        vertices: r.vertex_count,
        strategy_pairs: r.strategy_pairs,
        affine_rank: r.affine_rank,
        tight: r.tight,
        regular_equivalent: r.regular_equivalent,
        expected_vertices: g.vertices,
        expected_rank: g.rank,
        expected_tight: g.tight,
        matches,
    })
}

pub fn run(cfg: &LhvConfig) -> Result<Vec<RowResult>> {
    GOLDEN.iter().map(|g| run_row(g, cfg)).collect()
}

fn verdict(t: bool) -> &'static str {
    if t {
        "Tight"
    } else {
        "Non-tight"
    }
}

pub fn render(rows: &[RowResult]) -> String {
    let mut s = format!(
        "{:<8} {:>4} {:>6} {:>9} {:>9} {:>5} {:<9} {:<7} {}\n",
        "matrix", "m", "C", "vertices", "pairs", "rank", "verdict", "regular", "expected"
    );
    for r in rows {
        let expected = if r.matches {
            "ok".to_string()
        } else {
            format!(
                "MISMATCH ({} / {} / {})",
                r.expected_vertices,
                r.expected_rank,
                verdict(r.expected_tight)
            )
        };
        s.push_str(&format!(
            "{:<8} {:>4} {:>6} {:>9} {:>9} {:>5} {:<9} {:<7} {}\n",
            r.label,
            r.m,
            r.lhv_value,
            r.vertices,
            r.strategy_pairs,
            r.affine_rank,
            verdict(r.tight),
            r.regular_equivalent,
            expected
        ));
    }
    s
}

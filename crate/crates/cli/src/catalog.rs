use std::sync::OnceLock;

use crystalk_core::lattice;
use crystalk_core::toruskt::{Ranks, Report};
use crystalk_core::{IntMatrix, ScopeFlag};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Instance of a closed-form rank formula.
    ClosedForm,
    /// Computed here and confirmed by the oracles.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub n: usize,
    pub matrix: IntMatrix,
    /// Ranks of `K_*(C*_r(Zⁿ ⋊ Z/2))`.
    pub expected: Ranks,
    pub scope_flag: ScopeFlag,
    pub provenance: Provenance,
}

fn entry(
    name: &str,
    description: &str,
    rows: &[Vec<i64>],
    expected: (u64, u64),
    scope_flag: ScopeFlag,
    provenance: Provenance,
) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        description: description.into(),
        n: rows.len(),
        matrix: IntMatrix::from_rows(rows),
        expected: Ranks { k0: expected.0, k1: expected.1 },
        scope_flag,
        provenance,
    }
}

pub fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        use Provenance::*;
        use ScopeFlag::*;
        vec![
            entry("infinite-dihedral", "Z ⋊ Z/2, σ = -1", &[vec![-1]], (3, 0), Validated, ClosedForm),
            entry("p2-type", "Z² ⋊ Z/2, σ = -I", &[vec![-1, 0], vec![0, -1]], (6, 0), Validated, ClosedForm),
            entry("pm-type", "Z² ⋊ Z/2, reflection diag(1, -1)", &[vec![1, 0], vec![0, -1]], (3, 3), Validated, ClosedForm),
            entry(
                "pm-skew",
                "reflection diag(1, -1) in a sheared basis",
                &[vec![1, 0], vec![4, -1]],
                (3, 3),
                Validated,
                Derived,
            ),
            entry("cm-swap", "Z² ⋊ Z/2, coordinate swap", &[vec![0, 1], vec![1, 0]], (2, 2), RationalOnly, Derived),
            entry("trivial-2", "Z² × Z/2", &[vec![1, 0], vec![0, 1]], (4, 4), Validated, Derived),
            entry(
                "free-3",
                "Z³ ⋊ Z/2, σ = -I",
                &[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]],
                (12, 0),
                Validated,
                ClosedForm,
            ),
            entry(
                "split-3",
                "Z³ ⋊ Z/2, diag(1, 1, -1)",
                &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]],
                (6, 6),
                Validated,
                ClosedForm,
            ),
            entry(
                "swap-plus-trivial",
                "Z³ ⋊ Z/2, trivial line plus coordinate swap",
                &[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]],
                (4, 4),
                RationalOnly,
                Derived,
            ),
        ]
    })
}

pub fn find(name: &str) -> Result<&'static CatalogEntry, CliError> {
    entries().iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = entries().iter().map(|e| e.name.as_str()).collect();
        CliError::Input(format!("no catalog entry {name:?}; known entries: {}", names.join(", ")))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub expected: Ranks,
    pub computed: Ranks,
    pub expected_scope: ScopeFlag,
    pub computed_scope: ScopeFlag,
    pub ok: bool,
}

/// Recomputes every entry.
pub fn check() -> Vec<CheckLine> {
    entries()
        .iter()
        .map(|e| {
            let l = lattice::validate_involution(&e.matrix).expect("catalog matrices are involutions");
            let r = Report::group_cstar(&l);
            CheckLine {
                name: e.name.clone(),
                expected: e.expected,
                computed: r.ranks,
                expected_scope: e.scope_flag,
                computed_scope: r.scope_flag,
                ok: r.ranks == e.expected && r.scope_flag == e.scope_flag,
            }
        })
        .collect()
}

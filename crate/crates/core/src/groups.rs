//! Built-in finite quantum groups: function algebras `C(Γ)`, group algebras
//! `C*(Γ)` and the eight-dimensional Kac–Paljutkin algebra, plus a classical
//! character-table oracle for finite groups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::algebra::QuantumGroup;
use crate::error::{QgError, Result};
use crate::format;
use crate::linalg::{self, c, CMat, CVec, C64, EIGENGAP_TOL, ONE};

const KAC_PALJUTKIN_DATA: &str = include_str!("../data/kac_paljutkin.qg");

/// Multiplication table of a finite group, 0-indexed: `table[g][h] = g·h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    n: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Deserialize)]
struct CayleyFile {
    n: usize,
    table: Vec<Vec<usize>>,
}

impl CayleyTable {
    /// Validate a raw table: Latin square, associativity, identity, inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(QgError::InvalidTable("empty table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(QgError::InvalidTable(format!(
                    "row {g} has length {}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(QgError::InvalidTable(format!(
                        "row {g} is not a permutation"
                    )));
                }
                seen[x] = true;
            }
        }
        for h in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[h]] {
                    return Err(QgError::InvalidTable(format!(
                        "column {h} is not a permutation"
                    )));
                }
                seen[row[h]] = true;
            }
        }
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    if table[table[a][b]][x] != table[a][table[b][x]] {
                        return Err(QgError::InvalidTable(format!(
                            "not associative at ({a}, {b}, {x})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| QgError::InvalidTable("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for (g, row) in table.iter().enumerate() {
            let inv = (0..n)
                .find(|&h| row[h] == identity && table[h][g] == identity)
                .ok_or_else(|| QgError::InvalidTable(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        Ok(CayleyTable {
            n,
            table,
            identity,
            inverse,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CayleyFile =
            serde_json::from_str(text).map_err(|e| QgError::Parse(format!("Cayley table: {e}")))?;
        if raw.table.len() != raw.n {
            return Err(QgError::Parse(format!(
                "Cayley table: n = {} but table has {} rows",
                raw.n,
                raw.table.len()
            )));
        }
        CayleyTable::new(raw.table)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|g| (0..n).map(|h| (g + h) % n).collect())
            .collect();
        CayleyTable::new(table).expect("cyclic group table is valid")
    }

    /// `S_3` as permutations of three points, listed lexicographically;
    /// `(σ·τ)(x) = σ(τ(x))`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index([s[t[0]], s[t[1]], s[t[2]]]))
                    .collect()
            })
            .collect();
        CayleyTable::new(table).expect("S_3 table is valid")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn product(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// Left regular representation: `L_g e_x = e_{gx}`.
    fn left_regular(&self) -> Vec<CMat> {
        (0..self.n)
            .map(|g| {
                let mut m = CMat::zeros(self.n, self.n);
                for x in 0..self.n {
                    m[(self.table[g][x], x)] = ONE;
                }
                m
            })
            .collect()
    }

    /// Right regular representation: `R_g e_x = e_{x g^{-1}}`, which commutes
    /// with the left one.
    fn right_regular(&self) -> Vec<CMat> {
        (0..self.n)
            .map(|g| {
                let mut m = CMat::zeros(self.n, self.n);
                for x in 0..self.n {
                    m[(self.table[x][self.inverse[g]], x)] = ONE;
                }
                m
            })
            .collect()
    }
}

/// `C(Γ)` with `Δ(δ_g) = Σ_{ab=g} δ_a ⊗ δ_b`.
pub fn function_algebra(t: &CayleyTable) -> Result<QuantumGroup> {
    let n = t.order();
    let mut delta = CMat::zeros(n * n, n);
    for a in 0..n {
        for b in 0..n {
            delta[(a * n + b, t.product(a, b))] = ONE;
        }
    }
    QuantumGroup::new(vec![1; n], delta, None)
}

/// A unitary irreducible representation of a finite group: one matrix per
/// group element.
#[derive(Debug, Clone)]
pub struct ClassicalIrrep {
    pub matrices: Vec<CMat>,
}

impl ClassicalIrrep {
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// A row of a character table.
#[derive(Debug, Clone)]
pub struct ClassicalCharacter {
    pub dim: usize,
    pub values: Vec<C64>,
}

/// Sort key for a complex vector, rounded so that numerically equal vectors
/// compare equal.
pub(crate) fn rounded_key(values: &[C64]) -> Vec<(i64, i64)> {
    values
        .iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

/// Decompose the classical left regular representation into irreducibles by
/// diagonalizing a random Hermitian element of its commutant (spanned by the
/// right regular representation), one representative per class, sorted by
/// `(dim, rounded character)`.
pub fn classical_irreps(t: &CayleyTable, seed: u64) -> Vec<ClassicalIrrep> {
    let n = t.order();
    let left = t.left_regular();
    let right = t.right_regular();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending = vec![CMat::identity(n, n)];
    let mut found: Vec<ClassicalIrrep> = Vec::new();
    let mut attempts = 0;
    while let Some(q) = pending.pop() {
        let rep: Vec<CMat> = left.iter().map(|l| q.adjoint() * l * &q).collect();
        let d = q.ncols();
        // Σ_g |χ(g)|² = |Γ| exactly for irreducibles
        let norm: f64 = rep.iter().map(|m| m.trace().norm_sqr()).sum();
        if (norm - n as f64).abs() < 1e-6 {
            found.push(ClassicalIrrep { matrices: rep });
            continue;
        }
        attempts += 1;
        assert!(
            attempts <= 64 * n,
            "classical decomposition failed to split"
        );
        let mut x = CMat::zeros(d, d);
        for r in &right {
            let w = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            x += q.adjoint() * r * &q * w;
        }
        let (vals, vecs) = linalg::hermitian_eigen(&(&x + x.adjoint()));
        let clusters = linalg::cluster_eigenvalues(&vals, EIGENGAP_TOL);
        if clusters.len() == 1 {
            pending.push(q);
            continue;
        }
        for cl in clusters {
            let cols: Vec<CVec> = cl.iter().map(|&i| vecs.column(i).into_owned()).collect();
            pending.push(&q * CMat::from_columns(&cols));
        }
    }

    let mut classes: Vec<ClassicalIrrep> = Vec::new();
    for irrep in found {
        let chi = irrep.character();
        let known = classes.iter().any(|other| {
            other
                .character()
                .iter()
                .zip(&chi)
                .all(|(a, b)| (a - b).norm() < 1e-6)
        });
        if !known {
            classes.push(irrep);
        }
    }
    classes.sort_by(|a, b| {
        (a.dim(), rounded_key(&a.character())).cmp(&(b.dim(), rounded_key(&b.character())))
    });
    classes
}

/// Irreducible characters of a finite group, computed only from its Cayley
/// table.
pub fn classical_character_oracle(t: &CayleyTable) -> Vec<ClassicalCharacter> {
    classical_irreps(t, 7)
        .iter()
        .map(|r| ClassicalCharacter {
            dim: r.dim(),
            values: r.character(),
        })
        .collect()
}

/// `C*(Γ)` in multi-matrix form `⊕_ρ M_{d_ρ}` with `λ_g ↦ ⊕_ρ ρ(g)` and
/// `Δ(λ_g) = λ_g ⊗ λ_g`.
pub fn group_algebra(t: &CayleyTable) -> Result<QuantumGroup> {
    let n = t.order();
    let irreps = classical_irreps(t, 11);
    let blocks: Vec<usize> = irreps.iter().map(|r| r.dim()).collect();
    let dim: usize = blocks.iter().map(|d| d * d).sum();
    if dim != n {
        return Err(QgError::InvalidTable(format!(
            "irreducible dimensions {blocks:?} do not account for order {n}"
        )));
    }
    // column g holds λ_g in the matrix-unit basis
    let mut lambda = CMat::zeros(dim, n);
    for g in 0..n {
        let mut offset = 0;
        for r in &irreps {
            let m = &r.matrices[g];
            let d = m.nrows();
            for p in 0..d {
                for q in 0..d {
                    lambda[(offset + p * d + q, g)] = m[(p, q)];
                }
            }
            offset += d * d;
        }
    }
    let inv = lambda
        .clone()
        .try_inverse()
        .ok_or_else(|| QgError::InvalidTable("group elements are not a basis".into()))?;
    let mut delta = CMat::zeros(dim * dim, dim);
    for g in 0..n {
        let lg = lambda.column(g).into_owned();
        let lgg = lg.kronecker(&lg);
        for j in 0..dim {
            let w = inv[(g, j)];
            for r in 0..dim * dim {
                delta[(r, j)] += lgg[r] * w;
            }
        }
    }
    QuantumGroup::new(blocks, delta, None)
}

/// The group-like element `λ_g` of a group algebra built by
/// [`group_algebra`] with the same table.
pub fn group_like(t: &CayleyTable, g: usize) -> CVec {
    let irreps = classical_irreps(t, 11);
    let mut out = Vec::new();
    for r in &irreps {
        let m = &r.matrices[g];
        for p in 0..m.nrows() {
            for q in 0..m.ncols() {
                out.push(m[(p, q)]);
            }
        }
    }
    CVec::from_vec(out)
}

/// The Kac–Paljutkin quantum group, loaded from the frozen data file.
pub fn kac_paljutkin() -> QuantumGroup {
    format::parse_quantum_group(KAC_PALJUTKIN_DATA)
        .expect("shipped Kac-Paljutkin data parses")
        .with_name("kac_paljutkin")
}

/// The Kac–Paljutkin comultiplication written out from its presentation on
/// `C^4 ⊕ M_2` with basis `e_1..e_4, E_11, E_12, E_21, E_22`. The shipped
/// data file is generated from this and must agree with it.
pub fn kac_paljutkin_presentation() -> QuantumGroup {
    let d = 8;
    let i = c(0.0, 1.0);
    let half = c(0.5, 0.0);
    let (e1, e2, e3, e4) = (0, 1, 2, 3);
    let (m11, m12, m21, m22) = (4, 5, 6, 7);
    let mut delta = CMat::zeros(d * d, d);
    let mut put = |target: usize, terms: &[(usize, usize, C64)]| {
        for &(a, b, w) in terms {
            delta[(a * d + b, target)] += w;
        }
    };
    let one = ONE;
    put(
        e1,
        &[
            (e1, e1, one),
            (e2, e2, one),
            (e3, e3, one),
            (e4, e4, one),
            (m11, m11, half),
            (m12, m12, half),
            (m21, m21, half),
            (m22, m22, half),
        ],
    );
    put(
        e2,
        &[
            (e1, e2, one),
            (e2, e1, one),
            (e3, e4, one),
            (e4, e3, one),
            (m11, m22, half),
            (m12, m21, -half * i),
            (m21, m12, half * i),
            (m22, m11, half),
        ],
    );
    put(
        e3,
        &[
            (e1, e3, one),
            (e3, e1, one),
            (e2, e4, one),
            (e4, e2, one),
            (m11, m22, half),
            (m12, m21, half * i),
            (m21, m12, -half * i),
            (m22, m11, half),
        ],
    );
    put(
        e4,
        &[
            (e1, e4, one),
            (e4, e1, one),
            (e2, e3, one),
            (e3, e2, one),
            (m11, m11, half),
            (m12, m12, -half),
            (m21, m21, -half),
            (m22, m22, half),
        ],
    );
    put(
        m11,
        &[
            (e1, m11, one),
            (m11, e1, one),
            (e2, m22, one),
            (m22, e2, one),
            (e3, m22, one),
            (m22, e3, one),
            (e4, m11, one),
            (m11, e4, one),
        ],
    );
    put(
        m12,
        &[
            (e1, m12, one),
            (m12, e1, one),
            (e2, m21, i),
            (m21, e2, -i),
            (e3, m21, -i),
            (m21, e3, i),
            (e4, m12, -one),
            (m12, e4, -one),
        ],
    );
    put(
        m21,
        &[
            (e1, m21, one),
            (m21, e1, one),
            (e2, m12, -i),
            (m12, e2, i),
            (e3, m12, i),
            (m12, e3, -i),
            (e4, m21, -one),
            (m21, e4, -one),
        ],
    );
    put(
        m22,
        &[
            (e1, m22, one),
            (m22, e1, one),
            (e2, m11, one),
            (m11, e2, one),
            (e3, m11, one),
            (m11, e3, one),
            (e4, m22, one),
            (m22, e4, one),
        ],
    );
    QuantumGroup::new(vec![1, 1, 1, 1, 2], delta, Some("kac_paljutkin".into()))
        .expect("shapes are fixed")
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "c_z2",
    "c_z3",
    "c_z4",
    "c_z5",
    "c_z6",
    "c_s3",
    "cstar_z2",
    "cstar_z3",
    "cstar_z4",
    "cstar_z5",
    "cstar_z6",
    "cstar_s3",
    "kac_paljutkin",
];

pub fn builtin_table(name: &str) -> Option<CayleyTable> {
    match name {
        "z2" => Some(CayleyTable::cyclic(2)),
        "z3" => Some(CayleyTable::cyclic(3)),
        "z4" => Some(CayleyTable::cyclic(4)),
        "z5" => Some(CayleyTable::cyclic(5)),
        "z6" => Some(CayleyTable::cyclic(6)),
        "s3" => Some(CayleyTable::symmetric3()),
        _ => None,
    }
}

/// Look up a built-in quantum group by name (see [`BUILTIN_NAMES`]).
pub fn builtin(name: &str) -> Option<QuantumGroup> {
    if name == "kac_paljutkin" {
        return Some(kac_paljutkin());
    }
    let (kind, group) = name.split_once('_')?;
    let table = builtin_table(group)?;
    let g = match kind {
        "c" => function_algebra(&table),
        "cstar" => group_algebra(&table),
        _ => return None,
    };
    g.ok().map(|g| g.with_name(name))
}

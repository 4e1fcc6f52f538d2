//! Source-problem instances: OuMv, CNF formulas and structured triangle
//! collection (TC*), with seeded generators, validators and file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version stamped into every instance file this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")))
    }
}

/// Square boolean matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        Ok(Self { n, bits: vec![false; n * n] })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let mut m = Self::zeros(rows.len())?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m.n {
                return Err(Error::LengthMismatch { expected: m.n, got: row.len() });
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.n + col] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.bits.chunks(self.n).map(<[bool]>::to_vec).collect()
    }
}

/// One online query `(u, v)` of an OuMv instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorPair {
    pub u: Vec<bool>,
    pub v: Vec<bool>,
}

/// A boolean matrix plus `n` vector pairs answered strictly in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OuMvInstance {
    matrix: BitMatrix,
    pairs: Vec<VectorPair>,
}

impl OuMvInstance {
    pub fn new(matrix: BitMatrix, pairs: Vec<VectorPair>) -> Result<Self> {
        let n = matrix.n();
        if pairs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: pairs.len() });
        }
        for pair in &pairs {
            for len in [pair.u.len(), pair.v.len()] {
                if len != n {
                    return Err(Error::LengthMismatch { expected: n, got: len });
                }
            }
        }
        Ok(Self { matrix, pairs })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn pairs(&self) -> &[VectorPair] {
        &self.pairs
    }

    pub fn to_json(&self) -> String {
        let as_bits = |v: &[bool]| v.iter().map(|&b| u8::from(b)).collect::<Vec<_>>();
        let file = OuMvFile {
            schema_version: SCHEMA_VERSION,
            n: self.n(),
            matrix: self.matrix.rows().iter().map(|r| as_bits(r)).collect(),
            pairs: self.pairs.iter().map(|p| [as_bits(&p.u), as_bits(&p.v)]).collect(),
        };
        serde_json::to_string(&file).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: OuMvFile = serde_json::from_str(text)?;
        check_schema(file.schema_version)?;
        let bits = |v: &[u8]| -> Result<Vec<bool>> {
            v.iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::Parse(format!("bit value {other} is not 0/1"))),
                })
                .collect()
        };
        let rows = file.matrix.iter().map(|r| bits(r)).collect::<Result<Vec<_>>>()?;
        if rows.len() != file.n {
            return Err(Error::Parse(format!("declared n={} but matrix has {} rows", file.n, rows.len())));
        }
        let matrix = BitMatrix::from_rows(&rows)?;
        let pairs = file
            .pairs
            .iter()
            .map(|[u, v]| Ok(VectorPair { u: bits(u)?, v: bits(v)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrix, pairs)
    }
}

fn check_schema(version: u32) -> Result<()> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported schema_version {version}")))
    }
}

#[derive(Serialize, Deserialize)]
struct OuMvFile {
    schema_version: u32,
    n: usize,
    matrix: Vec<Vec<u8>>,
    pairs: Vec<[Vec<u8>; 2]>,
}

/// Each matrix and vector bit is independently 1 with probability `density`.
pub fn gen_oumv(n: usize, density: f64, seed: u64) -> Result<OuMvInstance> {
    check_probability(density)?;
    let mut matrix = BitMatrix::zeros(n)?;
    let mut rng = rng_for(seed);
    for i in 0..n {
        for j in 0..n {
            matrix.set(i, j, rng.gen_bool(density));
        }
    }
    let draw = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_bool(density)).collect::<Vec<_>>();
    let pairs = (0..n)
        .map(|_| {
            let u = draw(&mut rng);
            let v = draw(&mut rng);
            VectorPair { u, v }
        })
        .collect();
    OuMvInstance::new(matrix, pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, positive: false }
    }

    fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    fn from_dimacs(lit: i64) -> Result<Self> {
        if lit == 0 {
            return Err(Error::Parse("literal 0 inside a clause".into()));
        }
        Ok(Self { var: lit.unsigned_abs() as usize - 1, positive: lit > 0 })
    }
}

pub type Clause = Vec<Literal>;

/// CNF formula over an even number of variables, split into a first half
/// (variables `0..h`) and a second half (`h..2h`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if num_vars == 0 || !num_vars.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "num_vars must be even and positive, got {num_vars}"
            )));
        }
        for clause in &clauses {
            for lit in clause {
                if lit.var >= num_vars {
                    return Err(Error::InvalidParameter(format!(
                        "literal variable {} out of range for {num_vars} variables",
                        lit.var
                    )));
                }
                if clause.contains(&Literal { var: lit.var, positive: !lit.positive }) {
                    return Err(Error::InvalidParameter(format!(
                        "clause contains both polarities of variable {}",
                        lit.var
                    )));
                }
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn half(&self) -> usize {
        self.num_vars / 2
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `assignment` bit `k` is the value of variable `k`.
    pub fn evaluate(&self, assignment: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| ((assignment >> l.var) & 1 == 1) == l.positive))
    }

    /// Whether the first-half assignment `a` (little-endian over variables
    /// `0..h`) satisfies `clause` on its own.
    pub fn first_half_satisfies(&self, clause: &Clause, a: u64) -> bool {
        let h = self.half();
        clause
            .iter()
            .filter(|l| l.var < h)
            .any(|l| ((a >> l.var) & 1 == 1) == l.positive)
    }

    /// Same as [`Self::first_half_satisfies`] for the second half; bit `k` of
    /// `b` is variable `h + k`.
    pub fn second_half_satisfies(&self, clause: &Clause, b: u64) -> bool {
        let h = self.half();
        clause
            .iter()
            .filter(|l| l.var >= h)
            .any(|l| ((b >> (l.var - h)) & 1 == 1) == l.positive)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("c schema_version {SCHEMA_VERSION}\np cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                if let Some(rest) = line.strip_prefix("c schema_version") {
                    let v: u32 = rest.trim().parse().map_err(|_| Error::Parse("bad schema_version".into()))?;
                    check_schema(v)?;
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Parse(format!("malformed header `{line}`")));
                }
                let vars = parts[1].parse().map_err(|_| Error::Parse("bad variable count".into()))?;
                let count = parts[2].parse().map_err(|_| Error::Parse("bad clause count".into()))?;
                header = Some((vars, count));
                continue;
            }
            if header.is_none() {
                return Err(Error::Parse("clause before `p cnf` header".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| Error::Parse(format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(Literal::from_dimacs(lit)?);
                }
            }
        }
        let (vars, count) = header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != count {
            return Err(Error::Parse(format!("header declares {count} clauses, found {}", clauses.len())));
        }
        Self::new(vars, clauses).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let file = CnfFile {
            schema_version: SCHEMA_VERSION,
            num_vars: self.num_vars,
            clauses: self.clauses.iter().map(|c| c.iter().map(|l| l.to_dimacs()).collect()).collect(),
        };
        serde_json::to_string(&file).expect("formula serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CnfFile = serde_json::from_str(text)?;
        check_schema(file.schema_version)?;
        let clauses = file
            .clauses
            .iter()
            .map(|c| c.iter().map(|&l| Literal::from_dimacs(l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.num_vars, clauses).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Accepts either the JSON wrapper or DIMACS text.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_dimacs(text)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CnfFile {
    schema_version: u32,
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

/// Random CNF: `num_clauses` clauses of `width` distinct variables each,
/// with independent uniform polarities.
pub fn gen_cnf(num_vars: usize, num_clauses: usize, width: usize, seed: u64) -> Result<CnfFormula> {
    if num_vars < 2 || !num_vars.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("num_vars must be even and >= 2, got {num_vars}")));
    }
    if width == 0 || width > num_vars {
        return Err(Error::InvalidParameter(format!("clause width {width} not in 1..={num_vars}")));
    }
    let mut rng = rng_for(seed);
    let clauses = (0..num_clauses)
        .map(|_| {
            let mut vars = index::sample(&mut rng, num_vars, width).into_vec();
            vars.sort_unstable();
            vars.into_iter().map(|var| Literal { var, positive: rng.gen_bool(0.5) }).collect()
        })
        .collect();
    CnfFormula::new(num_vars, clauses)
}

/// Coordinate `(color, j, x)` of a B- or C-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub color: usize,
    pub j: usize,
    pub x: usize,
}

impl Slot {
    pub fn new(color: usize, j: usize, x: usize) -> Self {
        Self { color, j, x }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.color, self.j, self.x)
    }
}

/// Structured tripartite node-colored graph.
///
/// `ab[(i, j, i')]` is the unique `x` with an edge `a^i_j - b^{i'}_{j,x}`;
/// `ac` likewise for C. `bc` holds `(b-slot, c-slot)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TcStarInstance {
    pub n: usize,
    pub delta: usize,
    pub p: usize,
    pub ab: Vec<usize>,
    pub ac: Vec<usize>,
    pub bc: BTreeSet<(Slot, Slot)>,
}

impl TcStarInstance {
    fn index(&self, i: usize, j: usize, i2: usize) -> usize {
        (i * self.delta + j) * self.n + i2
    }

    pub fn ab(&self, i: usize, j: usize, b_color: usize) -> usize {
        self.ab[self.index(i, j, b_color)]
    }

    pub fn ac(&self, i: usize, j: usize, c_color: usize) -> usize {
        self.ac[self.index(i, j, c_color)]
    }

    pub fn has_bc(&self, b: Slot, c: Slot) -> bool {
        self.bc.contains(&(b, c))
    }

    /// Number of nodes in one of the B or C partitions.
    pub fn side_size(&self) -> usize {
        self.n * self.delta * self.p
    }

    /// Dense index of a B/C slot within its partition.
    pub fn slot_index(&self, s: Slot) -> usize {
        (s.color * self.delta + s.j) * self.p + s.x
    }

    /// Whether colors `(i, b_color, c_color)` have a triangle for some `j`.
    pub fn has_triangle(&self, i: usize, b_color: usize, c_color: usize) -> bool {
        (0..self.delta).any(|j| {
            let b = Slot::new(b_color, j, self.ab(i, j, b_color));
            let c = Slot::new(c_color, j, self.ac(i, j, c_color));
            self.has_bc(b, c)
        })
    }

    pub fn to_json(&self) -> String {
        let mut ab = Vec::with_capacity(self.ab.len());
        let mut ac = Vec::with_capacity(self.ac.len());
        for i in 0..self.n {
            for j in 0..self.delta {
                for i2 in 0..self.n {
                    ab.push([i, j, i2, self.ab(i, j, i2)]);
                    ac.push([i, j, i2, self.ac(i, j, i2)]);
                }
            }
        }
        let file = TcStarFile {
            schema_version: SCHEMA_VERSION,
            n: self.n,
            delta: self.delta,
            p: self.p,
            ab,
            ac,
            bc: self
                .bc
                .iter()
                .map(|(b, c)| [[b.color, b.j, b.x], [c.color, c.j, c.x]])
                .collect(),
        };
        serde_json::to_string(&file).expect("instance serializes")
    }

    /// Parses and validates; structural violations become a parse error
    /// listing every offending tuple.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TcStarFile = serde_json::from_str(text)?;
        check_schema(file.schema_version)?;
        let (n, delta, p) = (file.n, file.delta, file.p);
        if n == 0 || delta == 0 || p == 0 {
            return Err(Error::Parse("n, delta and p must be positive".into()));
        }
        let mut problems = Vec::new();
        let dense = |entries: &[[usize; 4]], label: &str, problems: &mut Vec<String>| {
            let mut map = BTreeMap::new();
            for &[i, j, i2, x] in entries {
                if i >= n || j >= delta || i2 >= n {
                    problems.push(format!("{label} entry ({i},{j},{i2}) out of range"));
                } else if map.insert((i, j, i2), x).is_some() {
                    problems.push(format!("{label} entry ({i},{j},{i2}) given more than once"));
                }
            }
            let mut out = Vec::with_capacity(n * delta * n);
            for i in 0..n {
                for j in 0..delta {
                    for i2 in 0..n {
                        match map.get(&(i, j, i2)) {
                            Some(&x) => out.push(x),
                            None => {
                                problems.push(format!("{label} entry ({i},{j},{i2}) missing"));
                                out.push(0);
                            }
                        }
                    }
                }
            }
            out
        };
        let ab = dense(&file.ab, "ab", &mut problems);
        let ac = dense(&file.ac, "ac", &mut problems);
        let bc = file
            .bc
            .iter()
            .map(|[b, c]| (Slot::new(b[0], b[1], b[2]), Slot::new(c[0], c[1], c[2])))
            .collect();
        let inst = TcStarInstance { n, delta, p, ab, ac, bc };
        problems.extend(validate_tcstar(&inst).violations.iter().map(ToString::to_string));
        if problems.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Parse(problems.join("; ")))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TcStarFile {
    schema_version: u32,
    n: usize,
    delta: usize,
    p: usize,
    ab: Vec<[usize; 4]>,
    ac: Vec<[usize; 4]>,
    bc: Vec<[[usize; 3]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TableShape { table: &'static str, expected: usize, got: usize },
    TargetOutOfRange { table: &'static str, i: usize, j: usize, color: usize, x: usize },
    BcOutOfRange { b: Slot, c: Slot },
    BcMismatchedJ { b: Slot, c: Slot },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TableShape { table, expected, got } => {
                write!(f, "{table} table has {got} entries, expected {expected}")
            }
            Violation::TargetOutOfRange { table, i, j, color, x } => {
                write!(f, "{table} entry ({i},{j},{color}) maps to x={x} outside [p]")
            }
            Violation::BcOutOfRange { b, c } => write!(f, "bc edge {b}-{c} has out-of-range coordinates"),
            Violation::BcMismatchedJ { b, c } => write!(f, "bc edge {b}-{c} joins different j"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_tcstar(inst: &TcStarInstance) -> ValidationReport {
    let mut violations = Vec::new();
    let expected = inst.n * inst.delta * inst.n;
    for (table, data) in [("ab", &inst.ab), ("ac", &inst.ac)] {
        if data.len() != expected {
            violations.push(Violation::TableShape { table, expected, got: data.len() });
            continue;
        }
        for i in 0..inst.n {
            for j in 0..inst.delta {
                for color in 0..inst.n {
                    let x = data[inst.index(i, j, color)];
                    if x >= inst.p {
                        violations.push(Violation::TargetOutOfRange { table, i, j, color, x });
                    }
                }
            }
        }
    }
    let in_range = |s: &Slot| s.color < inst.n && s.j < inst.delta && s.x < inst.p;
    for &(b, c) in &inst.bc {
        if !in_range(&b) || !in_range(&c) {
            violations.push(Violation::BcOutOfRange { b, c });
        }
        if b.j != c.j {
            violations.push(Violation::BcMismatchedJ { b, c });
        }
    }
    ValidationReport { violations }
}

fn check_tcstar_params(n: usize, delta: usize, p: usize) -> Result<()> {
    if n == 0 || delta == 0 || p == 0 {
        return Err(Error::InvalidParameter(format!("n, delta, p must be >= 1 (got {n}, {delta}, {p})")));
    }
    Ok(())
}

pub fn gen_tcstar(n: usize, delta: usize, p: usize, bc_density: f64, seed: u64) -> Result<TcStarInstance> {
    check_tcstar_params(n, delta, p)?;
    check_probability(bc_density)?;
    let mut rng = rng_for(seed);
    let size = n * delta * n;
    let ab = (0..size).map(|_| rng.gen_range(0..p)).collect();
    let ac = (0..size).map(|_| rng.gen_range(0..p)).collect();
    let mut bc = BTreeSet::new();
    for j in 0..delta {
        for bcol in 0..n {
            for x in 0..p {
                for ccol in 0..n {
                    for y in 0..p {
                        if rng.gen_bool(bc_density) {
                            bc.insert((Slot::new(bcol, j, x), Slot::new(ccol, j, y)));
                        }
                    }
                }
            }
        }
    }
    Ok(TcStarInstance { n, delta, p, ab, ac, bc })
}

/// A fully dense random instance with every triangle of colors
/// `target = (i, b_color, c_color)` destroyed, so the target triple is
/// triangle-free.
pub fn plant_tcstar(
    n: usize,
    delta: usize,
    p: usize,
    seed: u64,
    target: (usize, usize, usize),
) -> Result<TcStarInstance> {
    let (i, alpha, beta) = target;
    if i >= n || alpha >= n || beta >= n {
        return Err(Error::InvalidParameter(format!("target {target:?} out of range for n={n}")));
    }
    let mut inst = gen_tcstar(n, delta, p, 1.0, seed)?;
    for j in 0..delta {
        let b = Slot::new(alpha, j, inst.ab(i, j, alpha));
        let c = Slot::new(beta, j, inst.ac(i, j, beta));
        inst.bc.remove(&(b, c));
    }
    Ok(inst)
}

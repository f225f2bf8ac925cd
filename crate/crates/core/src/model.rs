//! Problem representations: QUBO and Ising forms, exact energies, single-flip
//! deltas and the `x = (s + 1) / 2` conversions between the two.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary assignment `x ∈ {0,1}^n`, one byte per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryAssignment(pub Vec<u8>);

impl BinaryAssignment {
    pub fn zeros(n: usize) -> Self {
        BinaryAssignment(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bits from the low `n` bits of `word` (bit `i` is variable `i`).
    pub fn from_word(word: u64, n: usize) -> Self {
        BinaryAssignment((0..n).map(|i| ((word >> i) & 1) as u8).collect())
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    pub fn to_spins(&self) -> SpinAssignment {
        SpinAssignment(self.0.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect())
    }
}

/// A spin assignment `s ∈ {-1,+1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinAssignment(pub Vec<i8>);

impl SpinAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Spin `i` is `+1` iff bit `i` of `word` is set.
    pub fn from_word(word: u64, n: usize) -> Self {
        SpinAssignment((0..n).map(|i| if (word >> i) & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn to_binary(&self) -> BinaryAssignment {
        BinaryAssignment(self.0.iter().map(|&s| u8::from(s > 0)).collect())
    }
}

/// One upper-triangular QUBO coefficient, `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuboEntry {
    pub i: usize,
    pub j: usize,
    pub q: f64,
}

/// Sparse upper-triangular QUBO: `E(x) = offset + Σ q_ij x_i x_j`.
///
/// Entries are kept sorted by `(i, j)`, unique and non-zero. A row-wise
/// adjacency is built at construction for O(degree) flip deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    entries: Vec<QuboEntry>,
    offset: f64,
    diag: Vec<f64>,
    adj: Adjacency,
}

/// Symmetric off-diagonal neighbourhoods in CSR form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Adjacency {
    start: Vec<usize>,
    nbr: Vec<usize>,
    weight: Vec<f64>,
}

impl Adjacency {
    fn build(n: usize, pairs: impl Iterator<Item = (usize, usize, f64)> + Clone) -> Self {
        let mut degree = vec![0usize; n];
        for (i, j, _) in pairs.clone() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for d in &degree {
            start.push(start.last().unwrap() + d);
        }
        let total = *start.last().unwrap();
        let mut nbr = vec![0; total];
        let mut weight = vec![0.0; total];
        let mut fill = start[..n].to_vec();
        for (i, j, w) in pairs {
            nbr[fill[i]] = j;
            weight[fill[i]] = w;
            fill[i] += 1;
            nbr[fill[j]] = i;
            weight[fill[j]] = w;
            fill[j] += 1;
        }
        Adjacency { start, nbr, weight }
    }

    /// `(neighbour, weight)` pairs of variable `i`.
    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.start[i], self.start[i + 1]);
        self.nbr[a..b].iter().copied().zip(self.weight[a..b].iter().copied())
    }

    #[inline]
    pub fn row_slices(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.start[i], self.start[i + 1]);
        (&self.nbr[a..b], &self.weight[a..b])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.start[i + 1] - self.start[i]
    }
}

impl QuboProblem {
    /// Validates and canonicalises `entries`: indices must be in range and
    /// `i <= j`; duplicate `(i, j)` keys are rejected; zero weights are dropped.
    pub fn new(n: usize, entries: Vec<QuboEntry>, offset: f64) -> Result<Self> {
        let mut entries: Vec<QuboEntry> = entries.into_iter().filter(|e| e.q != 0.0).collect();
        for e in &entries {
            if e.i >= n || e.j >= n {
                return Err(Error::Validation(format!(
                    "entry ({}, {}) out of range for n = {n}",
                    e.i, e.j
                )));
            }
            if e.i > e.j {
                return Err(Error::Validation(format!(
                    "entry ({}, {}) is below the diagonal",
                    e.i, e.j
                )));
            }
            if !e.q.is_finite() {
                return Err(Error::Validation(format!("entry ({}, {}) is not finite", e.i, e.j)));
            }
        }
        if !offset.is_finite() {
            return Err(Error::Validation("offset is not finite".into()));
        }
        entries.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = entries.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::Validation(format!("duplicate entry ({}, {})", w[0].i, w[0].j)));
        }
        Ok(Self::from_canonical(n, entries, offset))
    }

    fn from_canonical(n: usize, entries: Vec<QuboEntry>, offset: f64) -> Self {
        let mut diag = vec![0.0; n];
        for e in entries.iter().filter(|e| e.i == e.j) {
            diag[e.i] = e.q;
        }
        let adj = Adjacency::build(
            n,
            entries.iter().filter(|e| e.i != e.j).map(|e| (e.i, e.j, e.q)),
        );
        QuboProblem { n, entries, offset, diag, adj }
    }

    /// Builds from a dense (possibly asymmetric) matrix, folding `Q_ij + Q_ji`
    /// into the upper triangle.
    pub fn from_dense(matrix: &[Vec<f64>], offset: f64) -> Result<Self> {
        let n = matrix.len();
        let mut b = QuboBuilder::new(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, actual: row.len() });
            }
            for (j, &q) in row.iter().enumerate() {
                b.add(i, j, q)?;
            }
        }
        b.add_offset(offset);
        b.build()
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[QuboEntry] {
        &self.entries
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adj
    }

    /// Number of distinct off-diagonal pairs with a non-zero weight.
    pub fn num_couplings(&self) -> usize {
        self.entries.iter().filter(|e| e.i != e.j).count()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension { expected: self.n, actual: len });
        }
        Ok(())
    }

    /// `offset + Σ q x_i x_j`, summed in entry order.
    pub fn energy(&self, x: &BinaryAssignment) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.energy_unchecked(&x.0))
    }

    pub(crate) fn energy_unchecked(&self, x: &[u8]) -> f64 {
        let mut e = self.offset;
        for en in &self.entries {
            if x[en.i] & x[en.j] == 1 {
                e += en.q;
            }
        }
        e
    }

    /// `E(x with bit i flipped) - E(x)`.
    pub fn flip_delta(&self, x: &BinaryAssignment, i: usize) -> Result<f64> {
        self.check_len(x.len())?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(self.flip_delta_unchecked(&x.0, i))
    }

    #[inline]
    pub(crate) fn flip_delta_unchecked(&self, x: &[u8], i: usize) -> f64 {
        let mut field = self.diag[i];
        for (j, w) in self.adj.row(i) {
            if x[j] == 1 {
                field += w;
            }
        }
        if x[i] == 1 {
            -field
        } else {
            field
        }
    }

    pub fn to_ising(&self) -> IsingProblem {
        qubo_to_ising(self)
    }
}

/// Accumulates QUBO terms, merging repeated keys and mirroring `j < i` into the
/// upper triangle.
#[derive(Debug, Clone, Default)]
pub struct QuboBuilder {
    n: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboBuilder {
    pub fn new(n: usize) -> Self {
        QuboBuilder { n, terms: BTreeMap::new(), offset: 0.0 }
    }

    pub fn add(&mut self, i: usize, j: usize, q: f64) -> Result<&mut Self> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { index: i.max(j), n: self.n });
        }
        if q != 0.0 {
            *self.terms.entry((i.min(j), i.max(j))).or_insert(0.0) += q;
        }
        Ok(self)
    }

    pub fn add_offset(&mut self, c: f64) -> &mut Self {
        self.offset += c;
        self
    }

    pub fn build(&self) -> Result<QuboProblem> {
        let entries = self
            .terms
            .iter()
            .filter(|(_, &q)| q != 0.0)
            .map(|(&(i, j), &q)| QuboEntry { i, j, q })
            .collect();
        QuboProblem::new(self.n, entries, self.offset)
    }
}

/// One Ising coupling `J_ij s_i s_j`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// `E(s) = offset + Σ_{i<j} J_ij s_i s_j + Σ h_i s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    n: usize,
    couplings: Vec<Coupling>,
    fields: Vec<f64>,
    offset: f64,
}

impl IsingProblem {
    /// Couplings must satisfy `i < j < n` with no repeated pair; zero couplings
    /// are dropped. `fields` must have length `n`.
    pub fn new(n: usize, couplings: Vec<Coupling>, fields: Vec<f64>, offset: f64) -> Result<Self> {
        if fields.len() != n {
            return Err(Error::Dimension { expected: n, actual: fields.len() });
        }
        let mut couplings: Vec<Coupling> =
            couplings.into_iter().filter(|c| c.value != 0.0).collect();
        for c in &couplings {
            if c.i >= c.j {
                return Err(Error::Validation(format!(
                    "coupling ({}, {}) must satisfy i < j",
                    c.i, c.j
                )));
            }
            if c.j >= n {
                return Err(Error::IndexOutOfRange { index: c.j, n });
            }
            if !c.value.is_finite() {
                return Err(Error::Validation(format!("coupling ({}, {}) is not finite", c.i, c.j)));
            }
        }
        if fields.iter().any(|h| !h.is_finite()) || !offset.is_finite() {
            return Err(Error::Validation("non-finite field or offset".into()));
        }
        couplings.sort_by_key(|c| (c.i, c.j));
        if let Some(w) = couplings.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::Validation(format!("duplicate coupling ({}, {})", w[0].i, w[0].j)));
        }
        Ok(IsingProblem { n, couplings, fields, offset })
    }

    /// Zero fields; used by the spin-glass and NAE 3-SAT generators.
    pub fn from_couplings(n: usize, couplings: Vec<Coupling>, offset: f64) -> Result<Self> {
        Self::new(n, couplings, vec![0.0; n], offset)
    }

    pub fn num_spins(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn energy(&self, s: &SpinAssignment) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: s.len() });
        }
        let mut e = self.offset;
        for c in &self.couplings {
            e += c.value * f64::from(s.0[c.i] * s.0[c.j]);
        }
        for (h, &si) in self.fields.iter().zip(&s.0) {
            e += h * f64::from(si);
        }
        Ok(e)
    }

    pub fn to_qubo(&self) -> QuboProblem {
        ising_to_qubo(self)
    }
}

/// Substitutes `s = 2x - 1`.
pub fn ising_to_qubo(p: &IsingProblem) -> QuboProblem {
    let mut b = QuboBuilder::new(p.n);
    for c in &p.couplings {
        // J (2x_i - 1)(2x_j - 1) = 4J x_i x_j - 2J x_i - 2J x_j + J
        b.add(c.i, c.j, 4.0 * c.value).expect("validated");
        b.add(c.i, c.i, -2.0 * c.value).expect("validated");
        b.add(c.j, c.j, -2.0 * c.value).expect("validated");
        b.add_offset(c.value);
    }
    for (i, &h) in p.fields.iter().enumerate() {
        b.add(i, i, 2.0 * h).expect("validated");
        b.add_offset(-h);
    }
    b.add_offset(p.offset);
    b.build().expect("finite inputs give a valid problem")
}

/// Substitutes `x = (s + 1) / 2`, using `x_i² = x_i` on the diagonal.
pub fn qubo_to_ising(p: &QuboProblem) -> IsingProblem {
    let mut fields = vec![0.0; p.n];
    let mut offset = p.offset;
    let mut couplings = Vec::with_capacity(p.entries.len());
    for e in &p.entries {
        if e.i == e.j {
            fields[e.i] += e.q / 2.0;
            offset += e.q / 2.0;
        } else {
            let quarter = e.q / 4.0;
            couplings.push(Coupling { i: e.i, j: e.j, value: quarter });
            fields[e.i] += quarter;
            fields[e.j] += quarter;
            offset += quarter;
        }
    }
    IsingProblem::new(p.n, couplings, fields, offset).expect("canonical QUBO maps to valid Ising")
}

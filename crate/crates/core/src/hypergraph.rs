//! Hypergraphs with hyperedges of size at most three, the `C(x)` matrices they
//! induce, and the periodic lattice / open chain generators.

use std::collections::BTreeSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// A hypergraph state description: `n` qubits, CCZ hyperedges, and optional
/// CZ / Z edges. Only `edges3` influences the stabilizer Rényi entropy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphJson", into = "HypergraphJson")]
pub struct Hypergraph3 {
    n: usize,
    edges3: BTreeSet<[usize; 3]>,
    edges2: BTreeSet<[usize; 2]>,
    edges1: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypergraphJson {
    n: usize,
    #[serde(default)]
    edges3: Vec<Vec<usize>>,
    #[serde(default)]
    edges2: Vec<Vec<usize>>,
    #[serde(default)]
    edges1: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphJson> for Hypergraph3 {
    type Error = Error;

    fn try_from(raw: HypergraphJson) -> Result<Self> {
        fn sized<const K: usize>(field: &str, edges: Vec<Vec<usize>>) -> Result<Vec<[usize; K]>> {
            edges
                .into_iter()
                .enumerate()
                .map(|(i, e)| {
                    <[usize; K]>::try_from(e.as_slice()).map_err(|_| {
                        Error::InvalidHypergraph(format!(
                            "{field}[{i}] has {} vertices, expected {K}",
                            e.len()
                        ))
                    })
                })
                .collect()
        }
        fn at(field: &str, i: usize) -> impl FnOnce(Error) -> Error + '_ {
            move |e| match e {
                Error::InvalidHypergraph(m) => Error::InvalidHypergraph(format!("{field}[{i}]: {m}")),
                other => other,
            }
        }
        let mut h = Hypergraph3::empty(raw.n);
        for (k, e) in sized::<3>("edges3", raw.edges3)?.into_iter().enumerate() {
            h.add_edge3(e).map_err(at("edges3", k))?;
        }
        for (k, [i, j]) in sized::<2>("edges2", raw.edges2)?.into_iter().enumerate() {
            h.add_edge2(i, j).map_err(at("edges2", k))?;
        }
        for (k, [i]) in sized::<1>("edges1", raw.edges1)?.into_iter().enumerate() {
            h.add_edge1(i).map_err(at("edges1", k))?;
        }
        Ok(h)
    }
}

impl From<Hypergraph3> for HypergraphJson {
    fn from(h: Hypergraph3) -> Self {
        HypergraphJson {
            n: h.n,
            edges3: h.edges3.iter().map(|e| e.to_vec()).collect(),
            edges2: h.edges2.iter().map(|e| e.to_vec()).collect(),
            edges1: h.edges1.iter().map(|&e| vec![e]).collect(),
        }
    }
}

impl Hypergraph3 {
    /// Hypergraph with the given CCZ hyperedges. Vertices within an edge may be
    /// listed in any order; repeated vertices and duplicate edges are errors.
    pub fn new(n: usize, edges3: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        let mut h = Self::empty(n);
        for e in edges3 {
            h.add_edge3(e)?;
        }
        Ok(h)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges3: BTreeSet::new(),
            edges2: BTreeSet::new(),
            edges1: BTreeSet::new(),
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::InvalidHypergraph(format!(
                "vertex {v} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    pub fn add_edge3(&mut self, mut e: [usize; 3]) -> Result<()> {
        for &v in &e {
            self.check_vertex(v)?;
        }
        e.sort_unstable();
        if e[0] == e[1] || e[1] == e[2] {
            return Err(Error::InvalidHypergraph(format!(
                "hyperedge {e:?} repeats a vertex"
            )));
        }
        if !self.edges3.insert(e) {
            return Err(Error::InvalidHypergraph(format!("duplicate hyperedge {e:?}")));
        }
        Ok(())
    }

    pub fn add_edge2(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::InvalidHypergraph(format!("edge ({i},{j}) repeats a vertex")));
        }
        let e = [i.min(j), i.max(j)];
        if !self.edges2.insert(e) {
            return Err(Error::InvalidHypergraph(format!("duplicate edge {e:?}")));
        }
        Ok(())
    }

    pub fn add_edge1(&mut self, i: usize) -> Result<()> {
        self.check_vertex(i)?;
        if !self.edges1.insert(i) {
            return Err(Error::InvalidHypergraph(format!("duplicate edge [{i}]")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges3(&self) -> &BTreeSet<[usize; 3]> {
        &self.edges3
    }

    pub fn edges2(&self) -> &BTreeSet<[usize; 2]> {
        &self.edges2
    }

    pub fn edges1(&self) -> &BTreeSet<usize> {
        &self.edges1
    }

    /// Copy without the CZ and Z edges.
    pub fn without_clifford_edges(&self) -> Self {
        Self {
            n: self.n,
            edges3: self.edges3.clone(),
            edges2: BTreeSet::new(),
            edges1: BTreeSet::new(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: HypergraphJson = serde_json::from_str(s).map_err(|e| Error::InvalidHypergraph(e.to_string()))?;
        Self::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    /// Strictly upper-triangular `C(x)` with `C[i][j] = Σ x_k` (mod 2) over
    /// hyperedges `{i, j, k}`.
    pub fn c_matrix(&self, x: &BitVec) -> Result<BitMatrix> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "bit-string has length {}, hypergraph has {} qubits",
                x.len(),
                self.n
            )));
        }
        let mut c = BitMatrix::zeros(self.n, self.n)?;
        for &[a, b, d] in &self.edges3 {
            // sorted, so each remaining pair is already (low, high)
            if x.get(d) {
                c.toggle(a, b);
            }
            if x.get(b) {
                c.toggle(a, d);
            }
            if x.get(a) {
                c.toggle(b, d);
            }
        }
        Ok(c)
    }

    /// `C'_k`, the pairs completing a hyperedge through vertex `k`.
    pub fn vertex_matrix(&self, k: usize) -> Result<BitMatrix> {
        if k >= self.n {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: k,
                size: self.n,
            });
        }
        self.c_matrix(&BitVec::unit(self.n, k))
    }

    /// Rows of `C'_k + C'_kᵀ` packed into one word each; requires `n <= 64`.
    pub(crate) fn vertex_polar_words(&self) -> Vec<Vec<u64>> {
        debug_assert!(self.n <= 64);
        let mut out = vec![vec![0u64; self.n]; self.n];
        for &[a, b, d] in &self.edges3 {
            for (k, i, j) in [(d, a, b), (b, a, d), (a, b, d)] {
                out[k][i] ^= 1 << j;
                out[k][j] ^= 1 << i;
            }
        }
        out
    }

    /// Per-vertex rank and degree statistics.
    pub fn vertex_stats(&self) -> Result<VertexStats> {
        let mut h_k = Vec::with_capacity(self.n);
        let mut delta_k = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let c = self.vertex_matrix(k)?;
            let two_h = c.symmetrize_upper()?.rank();
            h_k.push(two_h / 2);
            delta_k.push(c.count_ones());
        }
        let mean = |v: &[usize]| {
            if v.is_empty() {
                Rational64::from_integer(0)
            } else {
                Rational64::new(v.iter().sum::<usize>() as i64, v.len() as i64)
            }
        };
        Ok(VertexStats {
            h_bar: mean(&h_k),
            delta_bar: mean(&delta_k),
            h_k,
            delta_k,
        })
    }
}

/// Per-vertex ranks `h_k` (half the rank of `C'_k + C'_kᵀ`) and hyperedge
/// degrees `Δ_k`, with their means.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexStats {
    pub h_k: Vec<usize>,
    pub delta_k: Vec<usize>,
    pub h_bar: Rational64,
    pub delta_bar: Rational64,
}

impl VertexStats {
    pub fn h_bar_f64(&self) -> f64 {
        *self.h_bar.numer() as f64 / *self.h_bar.denom() as f64
    }

    pub fn delta_bar_f64(&self) -> f64 {
        *self.delta_bar.numer() as f64 / *self.delta_bar.denom() as f64
    }
}

/// Open 1D triangle chain with hyperedges `(i, i+1, i+2)`.
pub fn chain(n: usize) -> Result<Hypergraph3> {
    if n < 3 {
        return Err(Error::InvalidLattice(format!("chain needs n >= 3, got {n}")));
    }
    Hypergraph3::new(n, (0..n - 2).map(|i| [i, i + 1, i + 2]))
}

fn insert_lattice_edge(h: &mut Hypergraph3, e: [usize; 3], kind: &str) -> Result<()> {
    let mut s = e;
    s.sort_unstable();
    if s[0] == s[1] || s[1] == s[2] {
        return Err(Error::InvalidLattice(format!(
            "{kind} lattice produced hyperedge {e:?} with a repeated qubit"
        )));
    }
    // a triangle generated twice is kept once
    h.edges3.insert(s);
    Ok(())
}

/// Periodic `l x l` Union Jack lattice with `2 l²` qubits.
///
/// Corner qubit `(r, c)` has index `r * l + c`; the centre of the square whose
/// top-left corner is `(r, c)` has index `l² + r * l + c`. Each square carries
/// four triangles (centre plus two adjacent corners).
pub fn union_jack(l: usize) -> Result<Hypergraph3> {
    if l < 2 {
        return Err(Error::InvalidLattice(format!("union jack needs L >= 2, got {l}")));
    }
    let corner = |r: usize, c: usize| (r % l) * l + (c % l);
    let mut h = Hypergraph3::empty(2 * l * l);
    for r in 0..l {
        for c in 0..l {
            let center = l * l + r * l + c;
            let ring = [corner(r, c), corner(r, c + 1), corner(r + 1, c + 1), corner(r + 1, c)];
            for t in 0..4 {
                insert_lattice_edge(&mut h, [center, ring[t], ring[(t + 1) % 4]], "union jack")?;
            }
        }
    }
    Ok(h)
}

/// Periodic `l x l` triangular lattice with `l²` qubits, site `(i, j)` at index
/// `i * l + j`. Each unit cell carries an up and a down triangle.
pub fn triangular(l: usize) -> Result<Hypergraph3> {
    if l < 3 {
        return Err(Error::InvalidLattice(format!("triangular needs L >= 3, got {l}")));
    }
    let site = |i: usize, j: usize| (i % l) * l + (j % l);
    let mut h = Hypergraph3::empty(l * l);
    for i in 0..l {
        for j in 0..l {
            insert_lattice_edge(&mut h, [site(i, j), site(i + 1, j), site(i, j + 1)], "triangular")?;
            insert_lattice_edge(
                &mut h,
                [site(i + 1, j), site(i, j + 1), site(i + 1, j + 1)],
                "triangular",
            )?;
        }
    }
    Ok(h)
}

/// Lattice families exposed by the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Chain,
    UnionJack,
    Triangular,
}

impl LatticeKind {
    /// Builds the lattice; `size` is N for the chain and L otherwise.
    pub fn build(self, size: usize) -> Result<Hypergraph3> {
        match self {
            LatticeKind::Chain => chain(size),
            LatticeKind::UnionJack => union_jack(size),
            LatticeKind::Triangular => triangular(size),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Chain => "chain",
            LatticeKind::UnionJack => "union-jack",
            LatticeKind::Triangular => "triangular",
        }
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "chain" => Ok(LatticeKind::Chain),
            "union-jack" | "unionjack" => Ok(LatticeKind::UnionJack),
            "triangular" => Ok(LatticeKind::Triangular),
            other => Err(Error::InvalidArgument {
                field: "lattice",
                reason: format!("unknown lattice kind `{other}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(v: &[u8]) -> BitVec {
        BitVec::from_bools(&v.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn c_matrix_single_edge() {
        let h = chain(3).unwrap();
        let c = h.c_matrix(&bits(&[1, 0, 0])).unwrap();
        let mut expected = BitMatrix::zeros(3, 3).unwrap();
        expected.set(1, 2, true);
        assert_eq!(c, expected);
    }

    #[test]
    fn c_matrix_zero_string() {
        let h = union_jack(3).unwrap();
        assert!(h.c_matrix(&BitVec::zeros(18)).unwrap().is_zero());
    }

    #[test]
    fn c_matrix_chain4_cancellation() {
        let h = chain(4).unwrap();
        let c = h.c_matrix(&bits(&[1, 0, 0, 1])).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn c_matrix_length_mismatch() {
        let h = chain(4).unwrap();
        assert!(matches!(h.c_matrix(&BitVec::zeros(3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn vertex_matrix_edge_cases() {
        let h = Hypergraph3::new(5, [[0, 1, 2]]).unwrap();
        assert!(h.vertex_matrix(4).unwrap().is_zero());
        assert!(matches!(h.vertex_matrix(5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn union_jack_vertex_ranks() {
        let h = union_jack(3).unwrap();
        let corner = h.vertex_matrix(0).unwrap().symmetrize_upper().unwrap();
        assert_eq!(corner.rank(), 6);
        let center = h.vertex_matrix(9).unwrap().symmetrize_upper().unwrap();
        assert_eq!(center.rank(), 2);
    }

    #[test]
    fn lattice_sizes() {
        let uj = union_jack(3).unwrap();
        assert_eq!((uj.n(), uj.edges3().len()), (18, 36));
        let s = uj.vertex_stats().unwrap();
        assert!(s.delta_k[..9].iter().all(|&d| d == 8));
        assert!(s.delta_k[9..].iter().all(|&d| d == 4));

        let uj2 = union_jack(2).unwrap();
        assert_eq!(uj2.edges3().len(), 16);
        let s2 = uj2.vertex_stats().unwrap();
        assert!(s2.delta_k[..4].iter().all(|&d| d == 8));
        assert!(s2.h_k[..4].iter().all(|&h| h == 1));

        let tri = triangular(3).unwrap();
        assert_eq!((tri.n(), tri.edges3().len()), (9, 18));
        let st = tri.vertex_stats().unwrap();
        assert!(st.delta_k.iter().all(|&d| d == 6));
        assert!(st.h_k.iter().all(|&h| h == 2));
    }

    #[test]
    fn lattice_errors() {
        assert!(matches!(union_jack(1), Err(Error::InvalidLattice(_))));
        assert!(matches!(triangular(2), Err(Error::InvalidLattice(_))));
        assert!(matches!(chain(2), Err(Error::InvalidLattice(_))));
    }

    #[test]
    fn chain_edges() {
        assert_eq!(chain(3).unwrap().edges3().iter().copied().collect::<Vec<_>>(), vec![[0, 1, 2]]);
        assert_eq!(
            chain(4).unwrap().edges3().iter().copied().collect::<Vec<_>>(),
            vec![[0, 1, 2], [1, 2, 3]]
        );
        let c8 = chain(8).unwrap();
        assert_eq!(c8.edges3().len(), 6);
        assert!(c8.edges3().contains(&[5, 6, 7]));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph3::new(3, [[0, 0, 1]]).is_err());
        assert!(Hypergraph3::new(3, [[0, 1, 3]]).is_err());
        assert!(Hypergraph3::new(3, [[0, 1, 2], [2, 1, 0]]).is_err());
        let mut h = Hypergraph3::empty(3);
        assert!(h.add_edge2(1, 1).is_err());
        h.add_edge2(0, 1).unwrap();
        assert!(h.add_edge2(1, 0).is_err());
        assert!(h.add_edge1(3).is_err());
    }

    #[test]
    fn json_format() {
        let h = Hypergraph3::from_json(
            r#"{"n": 4, "edges3": [[2,1,0],[1,2,3]], "edges2": [[0,3]], "edges1": [[2]]}"#,
        )
        .unwrap();
        assert_eq!(h.n(), 4);
        assert!(h.edges3().contains(&[0, 1, 2]));
        assert_eq!(
            h.to_json(),
            r#"{"n":4,"edges3":[[0,1,2],[1,2,3]],"edges2":[[0,3]],"edges1":[[2]]}"#
        );
        assert_eq!(Hypergraph3::from_json(&h.to_json()).unwrap(), h);
        let only_n = Hypergraph3::from_json(r#"{"n": 2}"#).unwrap();
        assert_eq!(only_n, Hypergraph3::empty(2));
    }

    #[test]
    fn json_errors_name_the_field() {
        let e = Hypergraph3::from_json(r#"{"n": 4, "edges3": [[0,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("edges3[0]"), "{e}");
        let e = Hypergraph3::from_json(r#"{"n": 4, "edgez": []}"#).unwrap_err();
        assert!(e.to_string().contains("edgez"), "{e}");
        assert!(Hypergraph3::from_json("{").is_err());
    }

    fn arb_hypergraph() -> impl Strategy<Value = Hypergraph3> {
        (3usize..=10).prop_flat_map(|n| {
            let triples: Vec<[usize; 3]> = (0..n)
                .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
                .collect();
            let m = triples.len();
            (
                proptest::collection::vec(any::<bool>(), m),
                proptest::collection::vec((0..n, 0..n), 0..6),
                proptest::collection::vec(0..n, 0..4),
            )
                .prop_map(move |(mask, e2, e1)| {
                    let mut h = Hypergraph3::new(
                        n,
                        triples.iter().zip(&mask).filter(|(_, &b)| b).map(|(t, _)| *t),
                    )
                    .unwrap();
                    for (i, j) in e2 {
                        let _ = h.add_edge2(i, j);
                    }
                    for i in e1 {
                        let _ = h.add_edge1(i);
                    }
                    h
                })
        })
    }

    proptest! {
        #[test]
        fn c_matrix_is_linear(h in arb_hypergraph(), x in any::<u64>(), y in any::<u64>()) {
            let n = h.n();
            let (bx, by) = (BitVec::from_u64(n, x), BitVec::from_u64(n, y));
            let mut bxy = bx.clone();
            bxy.xor_assign(&by);
            let mut sum = h.c_matrix(&bx).unwrap();
            sum.xor_assign(&h.c_matrix(&by).unwrap()).unwrap();
            prop_assert_eq!(h.c_matrix(&bxy).unwrap(), sum);
        }

        #[test]
        fn vertex_matrix_matches_unit_string(h in arb_hypergraph()) {
            for k in 0..h.n() {
                prop_assert_eq!(
                    h.vertex_matrix(k).unwrap(),
                    h.c_matrix(&BitVec::unit(h.n(), k)).unwrap()
                );
            }
        }

        #[test]
        fn clifford_edges_do_not_change_c(h in arb_hypergraph(), x in any::<u64>()) {
            let bare = h.without_clifford_edges();
            let bx = BitVec::from_u64(h.n(), x);
            prop_assert_eq!(h.c_matrix(&bx).unwrap(), bare.c_matrix(&bx).unwrap());
        }

        #[test]
        fn rank_at_most_degree(h in arb_hypergraph()) {
            let s = h.vertex_stats().unwrap();
            for k in 0..h.n() {
                prop_assert!(s.h_k[k] <= s.delta_k[k]);
            }
        }

        #[test]
        fn json_round_trip(h in arb_hypergraph()) {
            prop_assert_eq!(Hypergraph3::from_json(&h.to_json()).unwrap(), h);
        }
    }
}

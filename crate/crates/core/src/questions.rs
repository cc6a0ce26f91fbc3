//! The question graph.
//!
//! Two distinct questions are either compatible (their Pauli strings commute,
//! both can be known at once) or complementary (they anti-commute, knowing one
//! wipes the other). Compatible pairs carry a correlation sign: the product
//! question answers whether the two agree (even, XNOR) or disagree (odd, XOR).
//! Complementary cliques are the sets bounded by the one-bit inequality; for
//! two qubits they are six pentagons and twenty triangles.

use crate::pauli::{symbolic_product, Axis, PauliError, Phase, QuestionIndex};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuestionsError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("relation is defined for distinct questions only")]
    SameQuestion,
    #[error("{0} and {1} are complementary; they carry no correlation")]
    ComplementaryPair(String, String),
    #[error("{0} and {1} are not complementary")]
    NotComplementary(String, String),
    #[error("operation supports up to {max} qubits, got {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("pentagon id must be 1..=6, got {0}")]
    BadPentagonId(usize),
    #[error("pentagons {0} and {1} overlap in {2} questions, expected exactly 1")]
    BrokenOverlap(usize, usize, usize),
    #[error("set is not mutually complementary: {0} vs {1}")]
    SetNotComplementary(String, String),
}

/// Pairwise relation between two distinct questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Compatible,
    Complementary,
}

/// Whether two questions anti-commute, read off the symbolic product phase.
pub fn relation(a: &QuestionIndex, b: &QuestionIndex) -> Result<Relation, QuestionsError> {
    if a == b {
        return Err(QuestionsError::SameQuestion);
    }
    let prod = symbolic_product(a, b)?;
    if prod.phase.is_imaginary() {
        Ok(Relation::Complementary)
    } else {
        Ok(Relation::Compatible)
    }
}

/// Count of slots where both axes are non-zero and unequal. Complementarity
/// is equivalent to this count being odd; `relation` is defined through the
/// product phase and the test suite holds the two criteria together.
pub fn conflicting_positions(
    a: &QuestionIndex,
    b: &QuestionIndex,
) -> Result<usize, QuestionsError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(PauliError::LengthMismatch(a.n_qubits(), b.n_qubits()).into());
    }
    Ok(a.axes()
        .iter()
        .zip(b.axes())
        .filter(|(&pa, &pb)| pa != Axis::O && pb != Axis::O && pa != pb)
        .count())
}

/// Correlation sign inside a compatible triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// XNOR: the product question asks "do the two agree?".
    Even,
    /// XOR: the product question asks "do the two disagree?".
    Odd,
}

/// A compatible pair together with its product question and correlation sign.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTriangle {
    pub members: [QuestionIndex; 3],
    pub parity: Parity,
}

/// Close a compatible pair into its correlation triangle.
pub fn correlation_triangle(
    a: &QuestionIndex,
    b: &QuestionIndex,
) -> Result<CorrelationTriangle, QuestionsError> {
    match relation(a, b)? {
        Relation::Complementary => Err(QuestionsError::ComplementaryPair(
            a.to_string(),
            b.to_string(),
        )),
        Relation::Compatible => {
            let prod = symbolic_product(a, b)?;
            let c = prod
                .result
                .expect("product of distinct commuting strings is not identity");
            let parity = match prod.phase {
                Phase::PlusOne => Parity::Even,
                Phase::MinusOne => Parity::Odd,
                _ => unreachable!("compatible pair with imaginary phase"),
            };
            Ok(CorrelationTriangle {
                members: [a.clone(), b.clone(), c],
                parity,
            })
        }
    }
}

/// A mutually complementary question set; `maximal` means no outside question
/// is complementary to every member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementaritySet {
    members: Vec<QuestionIndex>,
    maximal: bool,
}

impl ComplementaritySet {
    /// Validates mutual complementarity; members are stored sorted.
    pub fn new(mut members: Vec<QuestionIndex>, maximal: bool) -> Result<Self, QuestionsError> {
        members.sort();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if relation(&members[i], &members[j])? != Relation::Complementary {
                    return Err(QuestionsError::SetNotComplementary(
                        members[i].to_string(),
                        members[j].to_string(),
                    ));
                }
            }
        }
        Ok(ComplementaritySet { members, maximal })
    }

    pub fn members(&self) -> &[QuestionIndex] {
        &self.members
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, q: &QuestionIndex) -> bool {
        self.members.binary_search(q).is_ok()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|q| q.to_string()).collect()
    }
}

/// Adjacency of the complementarity graph as bitmasks (fits u64 up to N=3).
fn complementarity_adjacency(n_qubits: usize) -> Result<Vec<u64>, QuestionsError> {
    let count = QuestionIndex::count(n_qubits);
    debug_assert!(count <= 64);
    let qs: Vec<QuestionIndex> = (0..count)
        .map(|p| QuestionIndex::from_position(n_qubits, p).expect("in range"))
        .collect();
    let mut adj = vec![0u64; count];
    for i in 0..count {
        for j in i + 1..count {
            if relation(&qs[i], &qs[j])? == Relation::Complementary {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    Ok(adj)
}

fn bron_kerbosch_pivot(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    // Pivot on the candidate dominating most of P to prune branches.
    let mut pivot = usize::MAX;
    let mut best = -1i64;
    let mut scan = p | x;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let gain = (p & adj[u]).count_ones() as i64;
        if gain > best {
            best = gain;
            pivot = u;
        }
    }
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        cand &= !bit;
        bron_kerbosch_pivot(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

fn mask_to_set(n_qubits: usize, mask: u64) -> ComplementaritySet {
    let mut members = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        members.push(QuestionIndex::from_position(n_qubits, v).expect("in range"));
    }
    // Bit order equals canonical order, so members are already sorted.
    ComplementaritySet {
        members,
        maximal: true,
    }
}

/// Enumerate all maximal mutually complementary sets, sorted lexicographically
/// by their sorted member lists.
pub fn maximal_complementary_sets(
    n_qubits: usize,
) -> Result<Vec<ComplementaritySet>, QuestionsError> {
    if n_qubits == 0 || n_qubits > 3 {
        return Err(QuestionsError::TooManyQubits {
            n: n_qubits,
            max: 3,
        });
    }
    let adj = complementarity_adjacency(n_qubits)?;
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut masks = Vec::new();
    bron_kerbosch_pivot(&adj, 0, all, 0, &mut masks);
    let mut sets: Vec<ComplementaritySet> = masks
        .into_iter()
        .map(|m| mask_to_set(n_qubits, m))
        .collect();
    sets.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(sets)
}

/// Compatible/complementary partner counts per question.
pub fn degree_profile(
    n_qubits: usize,
) -> Result<Vec<(QuestionIndex, usize, usize)>, QuestionsError> {
    if n_qubits == 0 || n_qubits > 4 {
        return Err(QuestionsError::TooManyQubits {
            n: n_qubits,
            max: 4,
        });
    }
    let count = QuestionIndex::count(n_qubits);
    let qs: Vec<QuestionIndex> = (0..count)
        .map(|p| QuestionIndex::from_position(n_qubits, p).expect("in range"))
        .collect();
    let mut compat = vec![0usize; count];
    let mut compl = vec![0usize; count];
    for i in 0..count {
        for j in i + 1..count {
            match relation(&qs[i], &qs[j])? {
                Relation::Compatible => {
                    compat[i] += 1;
                    compat[j] += 1;
                }
                Relation::Complementary => {
                    compl[i] += 1;
                    compl[j] += 1;
                }
            }
        }
    }
    Ok(qs
        .into_iter()
        .enumerate()
        .map(|(i, q)| (q, compat[i], compl[i]))
        .collect())
}

/// Total number of complementary pairs.
pub fn complementary_pair_count(n_qubits: usize) -> Result<usize, QuestionsError> {
    let profile = degree_profile(n_qubits)?;
    Ok(profile.iter().map(|(_, _, c)| c).sum::<usize>() / 2)
}

const PENTAGON_LABELS: [[&str; 5]; 6] = [
    ["xx", "xy", "xz", "y0", "z0"],
    ["xx", "yx", "zx", "0y", "0z"],
    ["yx", "yy", "yz", "x0", "z0"],
    ["xy", "yy", "zy", "0x", "0z"],
    ["zx", "zy", "zz", "x0", "y0"],
    ["xz", "yz", "zz", "0x", "0y"],
];

const TRIANGLE_LABELS: [[&str; 3]; 20] = [
    ["xx", "xy", "0z"],
    ["xx", "xz", "0y"],
    ["xx", "yx", "z0"],
    ["xx", "zx", "y0"],
    ["xy", "xz", "0x"],
    ["xy", "yy", "z0"],
    ["xy", "zy", "y0"],
    ["xz", "zz", "y0"],
    ["xz", "yz", "z0"],
    ["yx", "yy", "0z"],
    ["yx", "yz", "0y"],
    ["yx", "zx", "x0"],
    ["yy", "yz", "0x"],
    ["yy", "zy", "x0"],
    ["yz", "zz", "x0"],
    ["zx", "zy", "0z"],
    ["zx", "zz", "0y"],
    ["zy", "zz", "0x"],
    ["x0", "y0", "z0"],
    ["0x", "0y", "0z"],
];

/// Pairs of triangle ids (1-based) whose information contents coincide on
/// every two-qubit pure state.
pub const TRIANGLE_IDENTITY_PAIRS: [(usize, usize); 10] = [
    (1, 15),
    (2, 14),
    (3, 18),
    (4, 13),
    (5, 12),
    (6, 17),
    (7, 11),
    (8, 10),
    (9, 16),
    (19, 20),
];

fn build_sets<const K: usize, const M: usize>(labels: &[[&str; K]; M]) -> Vec<ComplementaritySet> {
    labels
        .iter()
        .map(|row| {
            let members = row
                .iter()
                .map(|s| s.parse().expect("valid label"))
                .collect();
            ComplementaritySet::new(members, true).expect("mutually complementary by construction")
        })
        .collect()
}

/// The six five-question sets for two qubits, in their conventional order.
pub fn pentagons() -> &'static [ComplementaritySet] {
    static SETS: OnceLock<Vec<ComplementaritySet>> = OnceLock::new();
    SETS.get_or_init(|| build_sets(&PENTAGON_LABELS))
}

/// The twenty three-question sets for two qubits, in their conventional order.
pub fn triangles() -> &'static [ComplementaritySet] {
    static SETS: OnceLock<Vec<ComplementaritySet>> = OnceLock::new();
    SETS.get_or_init(|| build_sets(&TRIANGLE_LABELS))
}

/// Pentagon by 1-based id.
pub fn pentagon(id: usize) -> Result<&'static ComplementaritySet, QuestionsError> {
    if id == 0 || id > 6 {
        return Err(QuestionsError::BadPentagonId(id));
    }
    Ok(&pentagons()[id - 1])
}

/// The unique question shared by two distinct pentagons.
pub fn pentagon_overlap(a: usize, b: usize) -> Result<QuestionIndex, QuestionsError> {
    if a == b {
        return Err(QuestionsError::BrokenOverlap(a, b, 5));
    }
    let pa = pentagon(a)?;
    let pb = pentagon(b)?;
    let shared: Vec<&QuestionIndex> = pa.members().iter().filter(|q| pb.contains(q)).collect();
    if shared.len() != 1 {
        return Err(QuestionsError::BrokenOverlap(a, b, shared.len()));
    }
    Ok(shared[0].clone())
}

/// Line-oriented adjacency export: `<a> <b> <compatible|complementary>` for
/// every unordered pair in canonical order.
pub fn export_adjacency(n_qubits: usize) -> Result<String, QuestionsError> {
    if n_qubits == 0 || n_qubits > 3 {
        return Err(QuestionsError::TooManyQubits {
            n: n_qubits,
            max: 3,
        });
    }
    let count = QuestionIndex::count(n_qubits);
    let qs: Vec<QuestionIndex> = (0..count)
        .map(|p| QuestionIndex::from_position(n_qubits, p).expect("in range"))
        .collect();
    let mut out = String::new();
    for i in 0..count {
        for j in i + 1..count {
            let word = match relation(&qs[i], &qs[j])? {
                Relation::Compatible => "compatible",
                Relation::Complementary => "complementary",
            };
            out.push_str(&format!("{} {} {}\n", qs[i], qs[j], word));
        }
    }
    Ok(out)
}

/// JSON listing of complementarity sets as arrays of index labels.
pub fn sets_to_json(sets: &[ComplementaritySet]) -> String {
    let rows: Vec<Vec<String>> = sets.iter().map(|s| s.labels()).collect();
    serde_json::to_string(&rows).expect("string arrays always serialize")
}

//! Comparison datasets and the four operations that edit them.
//!
//! A dataset is an ordered list of comparison samples `(a, b, r)`: a judgment
//! `r` of alternative `a` relative to `b`, positive meaning `a` is preferred.
//! The pair `(a, b, r)` and its flip `(b, a, -r)` denote the same judgment;
//! storage keeps whichever orientation was given and the equivalence is
//! applied where it matters (favoring checks, equality of judgments).
//!
//! Four primitive edits act on datasets — [`DatasetOp::Exchange`],
//! [`DatasetOp::Shuffle`], [`DatasetOp::Append`], [`DatasetOp::Update`] —
//! and [`op_favors`] classifies which of them *favor* one alternative over
//! another. That classification is what the monotonicity property quantifies
//! over: operations favoring `a` must never lower `a`'s fitted score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root_law::RootLaw;

/// One pairwise judgment: `r` compares alternative `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSample {
    pub a: usize,
    pub b: usize,
    pub r: f64,
}

impl ComparisonSample {
    /// Whether two samples encode the same judgment, i.e. equal as given or
    /// equal after flipping one side's orientation: `(a,b,r) ≃ (b,a,-r)`.
    pub fn same_judgment(&self, other: &ComparisonSample) -> bool {
        (self.a == other.a && self.b == other.b && self.r == other.r)
            || (self.a == other.b && self.b == other.a && self.r == -other.r)
    }
}

/// An ordered list of comparison samples over `num_alternatives` alternatives.
///
/// Ids are `0..num_alternatives`. Duplicate pairs are allowed and accumulate
/// in the model; order matters only for operations that address entries by
/// index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<ComparisonSample>,
    num_alternatives: usize,
}

impl Dataset {
    /// An empty dataset over `num_alternatives` alternatives.
    pub fn new(num_alternatives: usize) -> Self {
        Dataset { samples: Vec::new(), num_alternatives }
    }

    /// Builds a dataset from raw triples, validating ids (`< A`, `a != b`).
    ///
    /// Comparison values are *not* range-checked here; pass a law to
    /// [`Dataset::validate_range`] or use [`DatasetOp`] application, which
    /// checks on entry.
    pub fn from_triples(num_alternatives: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let mut d = Dataset::new(num_alternatives);
        for &(a, b, r) in triples {
            d.push(a, b, r)?;
        }
        Ok(d)
    }

    /// Appends a sample in place, validating ids.
    pub fn push(&mut self, a: usize, b: usize, r: f64) -> Result<()> {
        let n = self.num_alternatives;
        if a >= n {
            return Err(Error::AlternativeOutOfBounds { id: a, num_alternatives: n });
        }
        if b >= n {
            return Err(Error::AlternativeOutOfBounds { id: b, num_alternatives: n });
        }
        if a == b {
            return Err(Error::SelfComparison(a));
        }
        self.samples.push(ComparisonSample { a, b, r });
        Ok(())
    }

    pub fn num_alternatives(&self) -> usize {
        self.num_alternatives
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[ComparisonSample] {
        &self.samples
    }

    pub fn get(&self, n: usize) -> Option<&ComparisonSample> {
        self.samples.get(n)
    }

    /// Checks every comparison value against the law's range.
    pub fn validate_range(&self, law: RootLaw) -> Result<()> {
        for s in &self.samples {
            if !law.contains(s.r) {
                return Err(Error::ComparisonOutOfRange { value: s.r, law: law.name() });
            }
        }
        Ok(())
    }

    /// Re-encodes the `n`-th comparison (0-indexed) as its equivalent flip:
    /// `(a, b, r)` becomes `(b, a, -r)`, the same judgment written from the
    /// other side. Out-of-range `n` returns the dataset unchanged.
    pub fn exchange(&self, n: usize) -> Dataset {
        let mut out = self.clone();
        if let Some(s) = out.samples.get_mut(n) {
            *s = ComparisonSample { a: s.b, b: s.a, r: -s.r };
        }
        out
    }

    /// Reorders the first `n_first` samples by `perm` (`perm[i]` is the old
    /// index of the sample placed at position `i`); the tail is untouched.
    ///
    /// # Panics
    /// If `perm` is not a permutation of `0..n_first` or `n_first` exceeds
    /// the dataset length.
    pub fn shuffle(&self, n_first: usize, perm: &[usize]) -> Dataset {
        assert!(n_first <= self.len(), "shuffle: n_first exceeds dataset length");
        assert_eq!(perm.len(), n_first, "shuffle: permutation length must equal n_first");
        let mut seen = vec![false; n_first];
        for &p in perm {
            assert!(p < n_first && !seen[p], "shuffle: not a permutation of 0..n_first");
            seen[p] = true;
        }
        let mut out = self.clone();
        for (i, &p) in perm.iter().enumerate() {
            out.samples[i] = self.samples[p];
        }
        out
    }

    /// Returns a copy with `(a, b, r)` appended, validating ids and that `r`
    /// lies in the law's range.
    pub fn append(&self, a: usize, b: usize, r: f64, law: RootLaw) -> Result<Dataset> {
        if !law.contains(r) {
            return Err(Error::ComparisonOutOfRange { value: r, law: law.name() });
        }
        let mut out = self.clone();
        out.push(a, b, r)?;
        Ok(out)
    }

    /// Returns a copy with the `n`-th comparison value replaced by `r`
    /// (same pair, new judgment). Out-of-range `n` returns the dataset
    /// unchanged; an out-of-range `r` is an error.
    pub fn update(&self, n: usize, r: f64, law: RootLaw) -> Result<Dataset> {
        if !law.contains(r) {
            return Err(Error::ComparisonOutOfRange { value: r, law: law.name() });
        }
        let mut out = self.clone();
        if let Some(s) = out.samples.get_mut(n) {
            s.r = r;
        }
        Ok(out)
    }
}

/// A parameterized dataset operation, serializable for witness replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DatasetOp {
    /// Re-encode the `n`-th comparison from the other side: `(b, a, -r)`.
    Exchange { n: usize },
    /// Reorder the first `n_first` samples by `perm`.
    Shuffle { n_first: usize, perm: Vec<usize> },
    /// Add a new comparison `(a, b, r)`.
    Append { a: usize, b: usize, r: f64 },
    /// Replace the `n`-th comparison value with `r`.
    Update { n: usize, r: f64 },
}

impl DatasetOp {
    /// Applies the operation, returning the edited dataset (input unchanged).
    pub fn apply(&self, d: &Dataset, law: RootLaw) -> Result<Dataset> {
        match self {
            DatasetOp::Exchange { n } => Ok(d.exchange(*n)),
            DatasetOp::Shuffle { n_first, perm } => Ok(d.shuffle(*n_first, perm)),
            DatasetOp::Append { a, b, r } => d.append(*a, *b, *r, law),
            DatasetOp::Update { n, r } => d.update(*n, *r, law),
        }
    }
}

/// Whether `op` favors alternative `a` over alternative `b` on dataset `d`.
///
/// Exchange and shuffle qualify unconditionally: they never change the fitted
/// scores, so they are neutral members of any favoring composition. An update
/// of entry `n = (a, b, s)` favors `a` over `b` iff the new value satisfies
/// `r >= s` (after orienting the entry as `(a, b, ·)`); an update addressing
/// a missing entry is the identity, hence neutral. An append favors `a` over
/// `b` only when it *infinitely* favors it: its sample is equivalent to
/// `(a, b, sup 𝓡)`. Laws with unbounded range have no such sample, so no
/// append favors anything under them.
pub fn op_favors(op: &DatasetOp, a: usize, b: usize, d: &Dataset, law: RootLaw) -> bool {
    match op {
        DatasetOp::Exchange { .. } | DatasetOp::Shuffle { .. } => true,
        DatasetOp::Update { n, r } => match d.get(*n) {
            None => true, // no such entry: the update is the identity
            Some(s) => {
                if s.a == a && s.b == b {
                    *r >= s.r
                } else if s.a == b && s.b == a {
                    -*r >= -s.r
                } else {
                    false
                }
            }
        },
        DatasetOp::Append { a: aa, b: bb, r } => {
            let sup = law.range_sup();
            if !sup.is_finite() {
                return false;
            }
            let appended = ComparisonSample { a: *aa, b: *bb, r: *r };
            appended.same_judgment(&ComparisonSample { a, b, r: sup })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d123() -> Dataset {
        Dataset::from_triples(3, &[(0, 1, 1.0), (1, 2, 0.2), (2, 0, -0.5)]).unwrap()
    }

    #[test]
    fn exchange_flips_one_entry_to_its_equivalent() {
        let d = Dataset::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        let e = d.exchange(0);
        assert_eq!(e.samples()[0], ComparisonSample { a: 1, b: 0, r: -1.0 });
        // The flip is the same judgment under the pair-orientation
        // equivalence.
        assert!(e.samples()[0].same_judgment(&d.samples()[0]));
        // Out-of-range index: unchanged.
        assert_eq!(d.exchange(5), d);
        // Input untouched.
        assert_eq!(d.samples()[0].r, 1.0);
    }

    #[test]
    fn update_replaces_the_value_only() {
        let d = Dataset::from_triples(2, &[(0, 1, 0.2)]).unwrap();
        let u = d.update(0, 0.9, RootLaw::Uniform).unwrap();
        assert_eq!(u.samples()[0], ComparisonSample { a: 0, b: 1, r: 0.9 });
        assert_eq!(d.update(7, 0.9, RootLaw::Uniform).unwrap(), d);
    }

    #[test]
    fn append_grows_by_one() {
        let d = Dataset::new(2);
        let a = d.append(0, 1, 1.0, RootLaw::Uniform).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.samples()[0], ComparisonSample { a: 0, b: 1, r: 1.0 });
        assert!(d.is_empty());
    }

    #[test]
    fn out_of_range_comparisons_are_rejected() {
        let d = Dataset::new(2);
        assert!(matches!(
            d.append(0, 1, 1.5, RootLaw::Uniform),
            Err(Error::ComparisonOutOfRange { .. })
        ));
        assert!(matches!(
            d.append(0, 1, 0.5, RootLaw::Binary),
            Err(Error::ComparisonOutOfRange { .. })
        ));
        // Gaussian accepts any finite value.
        assert!(d.append(0, 1, 42.0, RootLaw::Gaussian).is_ok());
        let d1 = d123();
        assert!(d1.update(0, 2.0, RootLaw::Uniform).is_err());
    }

    #[test]
    fn id_validation() {
        let mut d = Dataset::new(3);
        assert!(matches!(d.push(0, 3, 1.0), Err(Error::AlternativeOutOfBounds { .. })));
        assert!(matches!(d.push(1, 1, 1.0), Err(Error::SelfComparison(1))));
    }

    #[test]
    fn shuffle_reorders_the_prefix() {
        let d = d123();
        let s = d.shuffle(2, &[1, 0]);
        assert_eq!(s.samples()[0], d.samples()[1]);
        assert_eq!(s.samples()[1], d.samples()[0]);
        assert_eq!(s.samples()[2], d.samples()[2]);
    }

    #[test]
    #[should_panic(expected = "not a permutation")]
    fn shuffle_rejects_non_permutations() {
        d123().shuffle(2, &[0, 0]);
    }

    #[test]
    fn judgment_equivalence_is_orientation_blind() {
        let s = ComparisonSample { a: 0, b: 1, r: 0.4 };
        assert!(s.same_judgment(&ComparisonSample { a: 1, b: 0, r: -0.4 }));
        assert!(!s.same_judgment(&ComparisonSample { a: 1, b: 0, r: 0.4 }));
    }

    #[test]
    fn exchange_and_shuffle_always_favor() {
        let d = d123();
        assert!(op_favors(&DatasetOp::Exchange { n: 0 }, 2, 0, &d, RootLaw::Uniform));
        let sh = DatasetOp::Shuffle { n_first: 3, perm: vec![2, 0, 1] };
        assert!(op_favors(&sh, 0, 1, &d, RootLaw::Uniform));
    }

    #[test]
    fn update_favoring_follows_the_entry_orientation() {
        let d = d123(); // entry 0 is (0, 1, 1.0), entry 1 is (1, 2, 0.2)
        assert!(op_favors(&DatasetOp::Update { n: 1, r: 0.9 }, 1, 2, &d, RootLaw::Uniform));
        assert!(!op_favors(&DatasetOp::Update { n: 1, r: -0.9 }, 1, 2, &d, RootLaw::Uniform));
        // Same update viewed from the other side favors 2 over 1 when r decreases.
        assert!(op_favors(&DatasetOp::Update { n: 1, r: -0.9 }, 2, 1, &d, RootLaw::Uniform));
        // Entry pairs (1,2); it cannot favor 0 over anything.
        assert!(!op_favors(&DatasetOp::Update { n: 1, r: 0.9 }, 0, 2, &d, RootLaw::Uniform));
        // Missing entry: identity, hence neutral.
        assert!(op_favors(&DatasetOp::Update { n: 99, r: 0.9 }, 0, 1, &d, RootLaw::Uniform));
    }

    #[test]
    fn only_maximal_appends_favor() {
        let d = Dataset::new(3);
        let max_append = DatasetOp::Append { a: 0, b: 1, r: 1.0 };
        assert!(op_favors(&max_append, 0, 1, &d, RootLaw::Uniform));
        // Flipped orientation with negated value is the same judgment.
        let flipped = DatasetOp::Append { a: 1, b: 0, r: -1.0 };
        assert!(op_favors(&flipped, 0, 1, &d, RootLaw::Uniform));
        // A non-extreme value does not qualify.
        assert!(!op_favors(&DatasetOp::Append { a: 0, b: 1, r: 0.5 }, 0, 1, &d, RootLaw::Uniform));
        // Unbounded range: no append ever favors.
        assert!(!op_favors(&DatasetOp::Append { a: 0, b: 1, r: 1e9 }, 0, 1, &d, RootLaw::Gaussian));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn exchange_is_an_involution(n in 0usize..6, len in 0usize..6) {
            let triples: Vec<_> = (0..len).map(|i| (i % 3, (i + 1) % 3, 0.1 * i as f64)).collect();
            let d = Dataset::from_triples(3, &triples).unwrap();
            prop_assert_eq!(d.exchange(n).exchange(n), d);
        }

        #[test]
        fn shuffle_preserves_multiset(perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
            let triples: Vec<_> = (0..5).map(|i| (i % 4, (i + 1) % 4, 0.1 * i as f64)).collect();
            let d = Dataset::from_triples(4, &triples).unwrap();
            let s = d.shuffle(5, &perm);
            let mut before: Vec<_> = d.samples().iter().map(|s| (s.a, s.b)).collect();
            let mut after: Vec<_> = s.samples().iter().map(|s| (s.a, s.b)).collect();
            before.sort_unstable();
            after.sort_unstable();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn ops_never_mutate_their_input(r in -1.0f64..1.0) {
            let d = d123();
            let snapshot = d.clone();
            let _ = d.exchange(1);
            let _ = d.update(1, r, RootLaw::Uniform);
            let _ = d.append(0, 2, r, RootLaw::Uniform);
            let _ = d.shuffle(3, &[2, 1, 0]);
            prop_assert_eq!(d, snapshot);
        }
    }
}

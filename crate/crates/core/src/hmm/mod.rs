//! First-order hidden Markov model over ambiguity classes.
//!
//! States are tags; observations are ambiguity classes. Emission is
//! parameterized per (tag, class) pair with the admissibility constraint
//! b_t(c) = 0 whenever t ∉ c, so each tag distributes emission mass over the
//! registry classes that contain it. Initialization is uniform plus
//! configurable symbol and transition biases; training is Baum-Welch on
//! untagged class sequences; decoding is Viterbi in log space.

mod biases;
mod serialize;
mod train;
mod viterbi;

pub use biases::{parse_biases, BiasDirection, BiasSpec, SymbolBias, TransitionBias};
pub use serialize::{deserialize_model, serialize_model};
pub use train::{baum_welch, forward_backward, Posteriors, TrainStats};
pub use viterbi::viterbi;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tagset::{AmbiguityClass, ClassRegistry, Tagset};

/// Default smoothing floor re-imposed after every re-estimation.
pub const DEFAULT_SMOOTHING_FLOOR: f64 = 1e-7;

/// Row-sum / distribution-sum tolerance for model validation.
pub const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HmmModel {
    tagset: Tagset,
    classes: Vec<AmbiguityClass>,
    class_index: HashMap<AmbiguityClass, usize>,
    /// Tag indices per class, in canonical (name) order.
    members: Vec<Vec<usize>>,
    /// Class indices per tag.
    admissible: Vec<Vec<usize>>,
    /// π, length n_tags.
    initial: Vec<f64>,
    /// A, n_tags × n_tags row-major; a[i*n+j] = P(tag_j | tag_i).
    transition: Vec<f64>,
    /// B, n_tags × n_classes row-major; b[t*m+c] = P(class_c | tag_t),
    /// zero when tag_t ∉ class_c.
    emission: Vec<f64>,
    floor: f64,
}

impl HmmModel {
    pub fn tagset(&self) -> &Tagset {
        &self.tagset
    }

    pub fn num_tags(&self) -> usize {
        self.tagset.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[AmbiguityClass] {
        &self.classes
    }

    pub fn smoothing_floor(&self) -> f64 {
        self.floor
    }

    pub fn class_index(&self, class: &AmbiguityClass) -> Result<usize> {
        self.class_index
            .get(class)
            .copied()
            .ok_or_else(|| Error::UnknownClass {
                class: class.to_string(),
            })
    }

    pub fn initial(&self, tag: usize) -> f64 {
        self.initial[tag]
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.num_tags() + to]
    }

    pub fn emission(&self, tag: usize, class: usize) -> f64 {
        self.emission[tag * self.num_classes() + class]
    }

    pub(crate) fn members(&self, class: usize) -> &[usize] {
        &self.members[class]
    }

    /// Checks the stochastic invariants: π sums to 1, every transition row
    /// sums to 1, every non-empty emission row sums to 1 over its admissible
    /// classes, inadmissible cells are exactly zero, and no stochastic cell
    /// sits below roughly the smoothing floor.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_tags();
        let m = self.num_classes();
        // The floor is applied before renormalization, which can shave a
        // hair off floored cells; allow half the floor as the hard bound.
        let min_allowed = self.floor / 2.0;

        let check_row = |row: &[f64], what: &str| -> Result<()> {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::CorruptModel(format!(
                    "{what} sums to {sum}, expected 1"
                )));
            }
            if row.iter().any(|&p| !(p >= 0.0) || p.is_nan()) {
                return Err(Error::CorruptModel(format!("{what} has negative entries")));
            }
            Ok(())
        };

        check_row(&self.initial, "initial distribution")?;
        if self.floor > 0.0 && self.initial.iter().any(|&p| p < min_allowed) {
            return Err(Error::CorruptModel("initial probability below floor".into()));
        }
        for i in 0..n {
            let row = &self.transition[i * n..(i + 1) * n];
            check_row(row, "transition row")?;
            if self.floor > 0.0 && row.iter().any(|&p| p < min_allowed) {
                return Err(Error::CorruptModel(
                    "transition probability below floor".into(),
                ));
            }
        }
        for t in 0..n {
            let row = &self.emission[t * m..(t + 1) * m];
            if self.admissible[t].is_empty() {
                if row.iter().any(|&p| p != 0.0) {
                    return Err(Error::CorruptModel(
                        "emission mass on tag with no admissible class".into(),
                    ));
                }
                continue;
            }
            check_row(row, "emission row")?;
            for (c, &p) in row.iter().enumerate() {
                let admissible = self.classes[c].contains(&self.tagset.tags()[t]);
                if !admissible && p != 0.0 {
                    return Err(Error::CorruptModel(
                        "emission mass on inadmissible class".into(),
                    ));
                }
                if admissible && self.floor > 0.0 && p < min_allowed {
                    return Err(Error::CorruptModel(
                        "emission probability below floor".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Raises weights to at least `floor` and normalizes to sum 1.
///
/// This is the exact maximizer of Σ wᵢ·log pᵢ over the floored simplex
/// {p : pᵢ ≥ floor, Σ pᵢ = 1}: cells are pinned at the floor until the
/// remaining mass distributes proportionally without violating it. Keeping
/// the M-step an exact constrained maximizer preserves EM monotonicity.
/// All-zero weights yield the uniform distribution.
pub(crate) fn floor_normalize(weights: &mut [f64], floor: f64) {
    let n = weights.len();
    if n == 0 {
        return;
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        let uniform = 1.0 / n as f64;
        weights.iter_mut().for_each(|w| *w = uniform);
        return;
    }
    if floor <= 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
        return;
    }
    if floor * n as f64 >= 1.0 {
        let uniform = 1.0 / n as f64;
        weights.iter_mut().for_each(|w| *w = uniform);
        return;
    }
    let mut pinned = vec![false; n];
    loop {
        let pinned_count = pinned.iter().filter(|&&p| p).count();
        let free_mass = 1.0 - floor * pinned_count as f64;
        let free_sum: f64 = weights
            .iter()
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|(w, _)| *w)
            .sum();
        if free_sum <= 0.0 {
            // Everything pinned or no mass left: spread the remainder evenly.
            let free_count = n - pinned_count;
            for (w, &p) in weights.iter_mut().zip(&pinned) {
                *w = if p {
                    floor
                } else {
                    free_mass / free_count.max(1) as f64
                };
            }
            return;
        }
        let scale = free_mass / free_sum;
        let mut newly_pinned = false;
        for (w, p) in weights.iter_mut().zip(pinned.iter_mut()) {
            if !*p && *w * scale < floor {
                *p = true;
                newly_pinned = true;
            }
        }
        if !newly_pinned {
            for (w, &p) in weights.iter_mut().zip(&pinned) {
                *w = if p { floor } else { *w * scale };
            }
            return;
        }
    }
}

/// Builds the bias-driven starting model: uniform π and transition rows,
/// uniform emission over each tag's admissible classes, then symbol and
/// transition biases applied and everything renormalized above the floor.
pub fn init_model(
    tagset: &Tagset,
    registry: &ClassRegistry,
    biases: &BiasSpec,
    floor: f64,
) -> Result<HmmModel> {
    if !(floor >= 0.0) {
        return Err(Error::InvalidConfig("smoothing floor must be >= 0".into()));
    }
    let n = tagset.len();
    let classes: Vec<AmbiguityClass> = registry.iter().cloned().collect();
    let m = classes.len();

    let mut class_index = HashMap::with_capacity(m);
    let mut members = Vec::with_capacity(m);
    for (c, class) in classes.iter().enumerate() {
        class_index.insert(class.clone(), c);
        let mut tag_indices: Vec<usize> = Vec::with_capacity(class.len());
        for tag in class.tags() {
            let idx = tagset
                .index_of(tag.name())
                .ok_or_else(|| Error::UnknownTag {
                    name: tag.name().to_string(),
                })?;
            tag_indices.push(idx);
        }
        members.push(tag_indices);
    }
    let mut admissible = vec![Vec::new(); n];
    for (c, tag_indices) in members.iter().enumerate() {
        for &t in tag_indices {
            admissible[t].push(c);
        }
    }

    let mut initial = vec![1.0; n];
    let mut transition = vec![1.0; n * n];
    let mut emission = vec![0.0; n * m];
    for t in 0..n {
        for &c in &admissible[t] {
            emission[t * m + c] = 1.0;
        }
    }

    // Symbol biases: multiply the favored tags' mass on the given class.
    for bias in &biases.symbol_biases {
        if bias.weight <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "symbol bias weight must be > 1, got {}",
                bias.weight
            )));
        }
        let c = *class_index
            .get(&bias.class)
            .ok_or_else(|| Error::UnknownBiasClass {
                class: bias.class.to_string(),
            })?;
        for tag in &bias.favored {
            let t = tagset
                .index_of(tag.name())
                .ok_or_else(|| Error::UnknownTag {
                    name: tag.name().to_string(),
                })?;
            if !bias.class.contains(tag) {
                return Err(Error::InvalidConfig(format!(
                    "symbol bias favors {} which is not in class {}",
                    tag, bias.class
                )));
            }
            emission[t * m + c] *= bias.weight;
        }
    }

    // Transition biases: favored cells are multiplied, disfavored cells are
    // set to the small constant (but never zero).
    for bias in &biases.transition_biases {
        let from = tagset
            .index_of(bias.from.name())
            .ok_or_else(|| Error::UnknownTag {
                name: bias.from.name().to_string(),
            })?;
        for tag in &bias.to {
            let to = tagset
                .index_of(tag.name())
                .ok_or_else(|| Error::UnknownTag {
                    name: tag.name().to_string(),
                })?;
            match bias.direction {
                BiasDirection::Favored => {
                    if bias.value <= 1.0 {
                        return Err(Error::InvalidConfig(format!(
                            "favored transition multiplier must be > 1, got {}",
                            bias.value
                        )));
                    }
                    transition[from * n + to] *= bias.value;
                }
                BiasDirection::Disfavored => {
                    if bias.value <= 0.0 {
                        return Err(Error::InvalidConfig(format!(
                            "disfavored transition constant must be > 0, got {}",
                            bias.value
                        )));
                    }
                    transition[from * n + to] = bias.value;
                }
            }
        }
    }

    floor_normalize(&mut initial, floor);
    for i in 0..n {
        floor_normalize(&mut transition[i * n..(i + 1) * n], floor);
    }
    for t in 0..n {
        if admissible[t].is_empty() {
            continue;
        }
        let row = &mut emission[t * m..(t + 1) * m];
        // Normalize over admissible cells only; inadmissible stay zero.
        let mut weights: Vec<f64> = admissible[t].iter().map(|&c| row[c]).collect();
        floor_normalize(&mut weights, floor);
        for (k, &c) in admissible[t].iter().enumerate() {
            row[c] = weights[k];
        }
    }

    let model = HmmModel {
        tagset: tagset.clone(),
        classes,
        class_index,
        members,
        admissible,
        initial,
        transition,
        emission,
        floor,
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;
    use crate::tagset::parse_tagset;

    fn two_tag_setup() -> (Tagset, ClassRegistry) {
        let ts = parse_tagset("T1\nT2\nOPEN: T1 T2").unwrap();
        let lex = parse_lexicon("a\tT1\nb\tT2\nc\tT1 T2\n", &ts).unwrap();
        let reg = ClassRegistry::from_lexicon(&lex, &ts);
        (ts, reg)
    }

    #[test]
    fn uniform_init_without_biases() {
        let (ts, reg) = two_tag_setup();
        // registry: {T1}, {T2}, {T1,T2} (open class coincides with {T1,T2})
        assert_eq!(reg.len(), 3);
        let model = init_model(&ts, &reg, &BiasSpec::default(), 0.0).unwrap();
        assert_eq!(model.initial(0), 0.5);
        assert_eq!(model.initial(1), 0.5);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(model.transition(i, j), 0.5);
            }
        }
        let t1 = ts.index_of("T1").unwrap();
        let singleton = model.class_index(&ts.make_class(["T1"]).unwrap()).unwrap();
        let both = model
            .class_index(&ts.make_class(["T1", "T2"]).unwrap())
            .unwrap();
        assert_eq!(model.emission(t1, singleton), 0.5);
        assert_eq!(model.emission(t1, both), 0.5);
    }

    #[test]
    fn disfavored_transition_gets_small_positive_constant() {
        let (ts, reg) = two_tag_setup();
        let biases = BiasSpec {
            symbol_biases: vec![],
            transition_biases: vec![TransitionBias {
                from: ts.tag("T1").unwrap(),
                to: vec![ts.tag("T2").unwrap()],
                direction: BiasDirection::Disfavored,
                value: 1e-4,
            }],
        };
        let model = init_model(&ts, &reg, &biases, 1e-7).unwrap();
        let a12 = model.transition(0, 1);
        assert!(a12 > 0.0);
        assert!(a12 < 1e-3);
        // Row still sums to one.
        let sum: f64 = (0..2).map(|j| model.transition(0, j)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_bias_ratio_before_renormalization() {
        // Both tags sit in two admissible classes, so before the bias their
        // cells are equal; a weight of 4 makes the favored/unfavored ratio 4
        // and per-tag renormalization preserves it within each row pair.
        let (ts, reg) = two_tag_setup();
        let both = ts.make_class(["T1", "T2"]).unwrap();
        let biases = BiasSpec {
            symbol_biases: vec![SymbolBias {
                class: both.clone(),
                favored: vec![ts.tag("T1").unwrap()],
                weight: 4.0,
            }],
            transition_biases: vec![],
        };
        let model = init_model(&ts, &reg, &biases, 0.0).unwrap();
        let c = model.class_index(&both).unwrap();
        let t1 = ts.index_of("T1").unwrap();
        let t2 = ts.index_of("T2").unwrap();
        // T1: weights (1, 4) over ({T1}, {T1,T2}) → 0.2 / 0.8
        assert!((model.emission(t1, c) - 0.8).abs() < 1e-12);
        // T2 untouched: 0.5 / 0.5
        assert!((model.emission(t2, c) - 0.5).abs() < 1e-12);
        assert!((model.emission(t1, c) / model.emission(t2, c) - 1.6).abs() < 1e-12);
    }

    #[test]
    fn bias_referencing_unknown_class_is_error() {
        let (ts, reg) = two_tag_setup();
        let ts_big = parse_tagset("T1\nT2\nT3\nOPEN: T1 T2 T3").unwrap();
        let biases = BiasSpec {
            symbol_biases: vec![SymbolBias {
                class: ts_big.make_class(["T1", "T3"]).unwrap(),
                favored: vec![ts_big.tag("T1").unwrap()],
                weight: 4.0,
            }],
            transition_biases: vec![],
        };
        assert!(matches!(
            init_model(&ts, &reg, &biases, 0.0),
            Err(Error::UnknownBiasClass { .. })
        ));
    }

    #[test]
    fn inert_tags_are_tolerated() {
        // T3 is declared but occurs in no registry class: its emission row
        // stays all-zero and validation still passes.
        let ts = parse_tagset("T1\nT2\nT3\nOPEN: T1 T2").unwrap();
        let lex = parse_lexicon("a\tT1\nb\tT2\n", &ts).unwrap();
        let reg = ClassRegistry::from_lexicon(&lex, &ts);
        let model = init_model(&ts, &reg, &BiasSpec::default(), 1e-7).unwrap();
        let t3 = ts.index_of("T3").unwrap();
        for c in 0..model.num_classes() {
            assert_eq!(model.emission(t3, c), 0.0);
        }
    }

    #[test]
    fn floor_normalize_exact_projection() {
        let mut w = vec![0.0, 1.0, 3.0];
        floor_normalize(&mut w, 0.1);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(w[0], 0.1);
        assert!((w[1] - 0.9 * 0.25).abs() < 1e-15);
        assert!((w[2] - 0.9 * 0.75).abs() < 1e-15);

        let mut all_zero = vec![0.0; 4];
        floor_normalize(&mut all_zero, 0.1);
        assert!(all_zero.iter().all(|&x| (x - 0.25).abs() < 1e-15));

        let mut no_floor = vec![2.0, 6.0];
        floor_normalize(&mut no_floor, 0.0);
        assert_eq!(no_floor, vec![0.25, 0.75]);
    }
}

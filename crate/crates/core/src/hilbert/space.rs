use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::label::{validate_token, BasisLabel, IntoLabel};
use crate::{Error, Result};

/// Ready and triggered tokens of a detector subsystem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorTokens {
    pub ready: String,
    pub triggered: String,
}

/// One tensor factor of a product space, i.e. one position in every label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    name: String,
    tokens: Vec<String>,
    detector: Option<DetectorTokens>,
}

impl Factor {
    pub fn new<I, S>(name: impl Into<String>, tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::new();
        for token in &tokens {
            validate_token(token)?;
            if !seen.insert(token.as_str()) {
                return Err(Error::TokenCollision(format!(
                    "token `{token}` repeated in subsystem `{name}`"
                )));
            }
        }
        Ok(Self {
            name,
            tokens,
            detector: None,
        })
    }

    /// A two-level detector whose first token is the ready state and second
    /// the triggered state.
    pub fn detector(
        name: impl Into<String>,
        ready: impl Into<String>,
        triggered: impl Into<String>,
    ) -> Result<Self> {
        let (ready, triggered) = (ready.into(), triggered.into());
        let mut factor = Factor::new(name, [ready.clone(), triggered.clone()])?;
        factor.detector = Some(DetectorTokens { ready, triggered });
        Ok(factor)
    }

    /// Detector named `X` with tokens `X` (ready) and `X*` (triggered).
    pub fn starred_detector(name: &str) -> Result<Self> {
        Factor::detector(name, name, format!("{name}*"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn detector_tokens(&self) -> Option<&DetectorTokens> {
        self.detector.as_ref()
    }

    pub fn has_token(&self, token: &str) -> bool {
        self.tokens.iter().any(|t| t == token)
    }
}

/// Ordered set of basis labels with an index map.
///
/// Spaces built with [`HilbertSpace::tensor`] know their factors by name.
/// Spaces built from a bare label list whose labels share one arity get
/// positional factors named `"0"`, `"1"`, ...
#[derive(Debug, PartialEq)]
pub struct HilbertSpace {
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn from_labels<I, L>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = L>,
        L: IntoLabel,
    {
        let labels = labels
            .into_iter()
            .map(IntoLabel::into_label)
            .collect::<Result<Vec<_>>>()?;
        let index = build_index(&labels)?;
        let factors = positional_factors(&labels);
        Ok(Arc::new(Self {
            labels,
            index,
            factors,
        }))
    }

    /// Product space with labels enumerated row-major (first factor slowest).
    pub fn tensor(factors: Vec<Factor>) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut names = HashSet::new();
        for f in &factors {
            if !names.insert(f.name.as_str()) {
                return Err(Error::TokenCollision(format!(
                    "subsystem `{}` declared twice",
                    f.name
                )));
            }
        }
        let mut labels: Vec<Vec<String>> = vec![Vec::new()];
        for f in &factors {
            labels = labels
                .into_iter()
                .flat_map(|prefix| {
                    f.tokens.iter().map(move |t| {
                        let mut next = prefix.clone();
                        next.push(t.clone());
                        next
                    })
                })
                .collect();
        }
        let labels = labels
            .into_iter()
            .map(BasisLabel::new)
            .collect::<Result<Vec<_>>>()?;
        let index = build_index(&labels)?;
        Ok(Arc::new(Self {
            labels,
            index,
            factors,
        }))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &BasisLabel {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Position of a label, failing with [`Error::UnknownLabel`].
    pub fn position(&self, label: impl IntoLabel) -> Result<usize> {
        let label = label.into_label()?;
        self.index_of(&label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_position(&self, name: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::UnknownToken(name.to_string()))
    }

    pub fn factor(&self, name: &str) -> Result<&Factor> {
        Ok(&self.factors[self.factor_position(name)?])
    }

    /// Indices of labels carrying the given token at each given position.
    pub(crate) fn matching<'a>(
        &'a self,
        fixed: &'a [(usize, &'a str)],
    ) -> impl Iterator<Item = usize> + 'a {
        self.labels
            .iter()
            .enumerate()
            .filter_map(move |(i, label)| {
                fixed
                    .iter()
                    .all(|&(pos, token)| label.part(pos) == Some(token))
                    .then_some(i)
            })
    }

    pub fn same_as(&self, other: &HilbertSpace) -> bool {
        std::ptr::eq(self, other) || self.labels == other.labels
    }
}

pub(crate) fn ensure_same(a: &HilbertSpace, b: &HilbertSpace) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

fn build_index(labels: &[BasisLabel]) -> Result<HashMap<BasisLabel, usize>> {
    if labels.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut index = HashMap::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        if index.insert(label.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
    }
    Ok(index)
}

fn positional_factors(labels: &[BasisLabel]) -> Vec<Factor> {
    let arity = labels[0].arity();
    if labels.iter().any(|l| l.arity() != arity) {
        return Vec::new();
    }
    (0..arity)
        .map(|pos| {
            let mut tokens: Vec<String> = Vec::new();
            for label in labels {
                let token = &label.parts()[pos];
                if !tokens.contains(token) {
                    tokens.push(token.clone());
                }
            }
            Factor {
                name: pos.to_string(),
                tokens,
                detector: None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_space_has_two_dimensions() {
        let space = HilbertSpace::from_labels(["z+", "z-"]).unwrap();
        assert_eq!(space.dim(), 2);
        assert_eq!(space.position("z-").unwrap(), 1);
    }

    #[test]
    fn product_of_photon_and_two_detectors_has_24_labels() {
        let photon = Factor::new("photon", ["a", "c", "d", "e", "f", "∅"]).unwrap();
        let c = Factor::new("C", ["0", "1"]).unwrap();
        let d = Factor::new("D", ["0", "1"]).unwrap();
        let space = HilbertSpace::tensor(vec![photon, c, d]).unwrap();
        // 6 photon tokens times 2 times 2, counted by enumerating labels
        let mut count = 0;
        for p in ["a", "c", "d", "e", "f", "∅"] {
            for cs in ["0", "1"] {
                for ds in ["0", "1"] {
                    let label = BasisLabel::new([p, cs, ds]).unwrap();
                    assert!(space.index_of(&label).is_some());
                    count += 1;
                }
            }
        }
        assert_eq!(space.dim(), count);
        assert_eq!(count, 24);
        for (i, label) in space.labels().iter().enumerate() {
            assert_eq!(space.index_of(label), Some(i));
        }
    }

    #[test]
    fn duplicate_and_empty_are_rejected() {
        assert_eq!(
            HilbertSpace::from_labels(["x", "x"]).unwrap_err(),
            Error::DuplicateLabel("x".into())
        );
        assert_eq!(
            HilbertSpace::from_labels(Vec::<&str>::new()).unwrap_err(),
            Error::EmptySpace
        );
    }

    #[test]
    fn positional_factors_follow_first_appearance() {
        let space = HilbertSpace::from_labels(["a,0", "b,0", "a,1"]).unwrap();
        assert_eq!(space.factors().len(), 2);
        assert_eq!(space.factor("0").unwrap().tokens(), ["a", "b"]);
        assert_eq!(space.factor("1").unwrap().tokens(), ["0", "1"]);
        let mixed = HilbertSpace::from_labels(["a", "b,0"]).unwrap();
        assert!(mixed.factors().is_empty());
    }

    #[test]
    fn starred_detector_registers_ready_and_triggered() {
        let f = Factor::starred_detector("E").unwrap();
        let tokens = f.detector_tokens().unwrap();
        assert_eq!(tokens.ready, "E");
        assert_eq!(tokens.triggered, "E*");
    }
}

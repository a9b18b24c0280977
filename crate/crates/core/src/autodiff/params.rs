use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamGroup {
    pub name: &'static str,
    pub range: Range<usize>,
}

fn layout(model: &Model) -> Vec<ParamGroup> {
    let mut offset = 0;
    model
        .segments()
        .into_iter()
        .map(|(name, seg)| {
            let range = offset..offset + seg.len();
            offset = range.end;
            ParamGroup { name, range }
        })
        .collect()
}

fn group_of(groups: &[ParamGroup], index: usize) -> &'static str {
    groups
        .iter()
        .find(|g| g.range.contains(&index))
        .map_or("?", |g| g.name)
}

/// Flat real view of every trainable coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub groups: Vec<ParamGroup>,
    pub values: Vec<f64>,
}

impl ParameterSet {
    pub fn from_model(model: &Model) -> Self {
        Self {
            groups: layout(model),
            values: model.segments().into_iter().flat_map(|(_, s)| s.iter().copied()).collect(),
        }
    }

    /// Writes the values back into `model`, whose layout must match.
    pub fn apply_to(&self, model: &mut Model) -> Result<()> {
        if layout(model) != self.groups {
            return Err(Error::Config("parameter layout does not match the model".into()));
        }
        let mut offset = 0;
        for (_, seg) in model.segments_mut() {
            seg.copy_from_slice(&self.values[offset..offset + seg.len()]);
            offset += seg.len();
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn group_of(&self, index: usize) -> &'static str {
        group_of(&self.groups, index)
    }
}

/// Gradient with the same flat layout as [`ParameterSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub groups: Vec<ParamGroup>,
    pub values: Vec<f64>,
}

impl GradientSet {
    pub fn zeros_like(model: &Model) -> Self {
        let groups = layout(model);
        let len = groups.last().map_or(0, |g| g.range.end);
        Self {
            groups,
            values: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn group(&self, name: &str) -> Option<&[f64]> {
        self.groups
            .iter()
            .find(|g| g.name == name)
            .map(|g| &self.values[g.range.clone()])
    }

    pub(crate) fn group_mut(&mut self, name: &str) -> &mut [f64] {
        let range = self
            .groups
            .iter()
            .find(|g| g.name == name)
            .map(|g| g.range.clone())
            .expect("known parameter group");
        &mut self.values[range]
    }

    pub fn group_of(&self, index: usize) -> &'static str {
        group_of(&self.groups, index)
    }

    /// First non-finite coordinate, if any.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|g| !g.is_finite()) {
            Some(index) => Err(Error::NonFiniteGradient {
                group: self.group_of(index),
                index,
            }),
            None => Ok(()),
        }
    }
}

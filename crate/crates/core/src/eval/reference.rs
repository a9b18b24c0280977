//! Published accuracies (percent) for comparison rows. `None` marks a result
//! that was not reported for that dataset.

use crate::model::ModelKind;

pub const REFERENCE_DATASETS: [&str; 5] = ["CR", "MPQA", "MR", "SST", "SUBJ"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub name: &'static str,
    pub accuracy: [Option<f64>; 5],
}

impl ReferenceRow {
    pub fn get(&self, dataset: &str) -> Option<f64> {
        dataset_column(dataset).and_then(|k| self.accuracy[k])
    }
}

/// External baselines, in display order.
pub const EXTERNAL_BASELINES: [ReferenceRow; 6] = [
    ReferenceRow {
        name: "Unigram-TFIDF",
        accuracy: [Some(79.2), Some(82.4), Some(73.7), None, Some(90.3)],
    },
    ReferenceRow {
        name: "word2vec BOW",
        accuracy: [Some(79.8), Some(88.3), Some(77.7), Some(79.7), Some(90.9)],
    },
    ReferenceRow {
        name: "fastText BOW",
        accuracy: [Some(78.9), Some(87.4), Some(76.5), Some(78.8), Some(91.6)],
    },
    ReferenceRow {
        name: "CaptionRep BOW",
        accuracy: [Some(69.3), Some(70.8), Some(61.9), None, Some(77.4)],
    },
    ReferenceRow {
        name: "DictRep BOW",
        accuracy: [Some(78.7), Some(87.2), Some(76.7), None, Some(90.7)],
    },
    ReferenceRow {
        name: "Paragram-Phrase",
        accuracy: [None, None, None, Some(79.7), None],
    },
];

/// Previously reported results for the models implemented here.
pub const REPORTED_MODELS: [(ModelKind, ReferenceRow); 3] = [
    (
        ModelKind::RealEmbed,
        ReferenceRow {
            name: "Real-Embed",
            accuracy: [Some(77.5), Some(84.7), Some(77.0), Some(80.0), Some(92.0)],
        },
    ),
    (
        ModelKind::CeSup,
        ReferenceRow {
            name: "CE-Sup",
            accuracy: [Some(80.0), Some(85.7), Some(78.4), Some(82.6), Some(92.6)],
        },
    ),
    (
        ModelKind::CeMix,
        ReferenceRow {
            name: "CE-Mix",
            accuracy: [Some(81.1), Some(86.6), Some(79.8), Some(83.3), Some(92.8)],
        },
    ),
];

/// Column of a dataset name, case-insensitive.
pub fn dataset_column(dataset: &str) -> Option<usize> {
    REFERENCE_DATASETS
        .iter()
        .position(|d| d.eq_ignore_ascii_case(dataset))
}

pub fn reported_accuracy(kind: ModelKind, dataset: &str) -> Option<f64> {
    REPORTED_MODELS
        .iter()
        .find(|(k, _)| *k == kind)
        .and_then(|(_, row)| row.get(dataset))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        assert_eq!(reported_accuracy(ModelKind::CeMix, "mr"), Some(79.8));
        assert_eq!(reported_accuracy(ModelKind::CeMix, "SST"), Some(83.3));
        assert_eq!(EXTERNAL_BASELINES[1].get("MPQA"), Some(88.3));
        assert_eq!(EXTERNAL_BASELINES[0].get("SST"), None);
        assert_eq!(dataset_column("toy"), None);
    }
}

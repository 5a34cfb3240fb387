//! Candidate peak hours from the first-difference sign change, with
//! endpoint correction and plateau flagging.

use serde::{Deserialize, Serialize};

use crate::profile::{DemandProfile, HOURS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    InteriorMax,
    LeftEndpoint,
    RightEndpoint,
    Plateau,
}

impl CandidateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::InteriorMax => "interior-max",
            Self::LeftEndpoint => "left-endpoint",
            Self::RightEndpoint => "right-endpoint",
            Self::Plateau => "plateau",
        }
    }

    // lower is stronger
    fn priority(&self) -> u8 {
        match self {
            Self::InteriorMax => 0,
            Self::LeftEndpoint | Self::RightEndpoint => 1,
            Self::Plateau => 2,
        }
    }
}

impl std::fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakCandidate {
    pub hour_index: usize,
    pub value: f64,
    pub kind: CandidateKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DetectOptions {
    /// Drop plateau candidates whose level rises less than this above the
    /// higher of their two neighbouring hours. `None` keeps every plateau.
    pub min_prominence: Option<f64>,
}

pub fn detect_peaks(profile: &DemandProfile) -> Vec<PeakCandidate> {
    detect_peaks_with(profile, &DetectOptions::default())
}

pub fn detect_peaks_with(profile: &DemandProfile, options: &DetectOptions) -> Vec<PeakCandidate> {
    let v = profile.values();
    let mut slots: [Option<CandidateKind>; HOURS] = [None; HOURS];
    let mut offer = |i: usize, kind: CandidateKind| {
        let slot = &mut slots[i];
        if slot.is_none_or(|k| kind.priority() < k.priority()) {
            *slot = Some(kind);
        }
    };

    for i in 1..HOURS - 1 {
        if v[i] - v[i - 1] > 0.0 && v[i + 1] - v[i] < 0.0 {
            offer(i, CandidateKind::InteriorMax);
        }
    }
    if v[0] > v[1] {
        offer(0, CandidateKind::LeftEndpoint);
    }
    if v[HOURS - 1] > v[HOURS - 2] {
        offer(HOURS - 1, CandidateKind::RightEndpoint);
    }

    let mut start = 0;
    while start < HOURS {
        let mut end = start;
        while end + 1 < HOURS && v[end + 1] == v[start] {
            end += 1;
        }
        let len = end - start + 1;
        if len >= 2 && plateau_kept(v, start, end, options) {
            offer(start + (len - 1) / 2, CandidateKind::Plateau);
        }
        start = end + 1;
    }

    slots
        .iter()
        .enumerate()
        .filter_map(|(i, k)| {
            k.map(|kind| PeakCandidate {
                hour_index: i,
                value: v[i],
                kind,
            })
        })
        .collect()
}

fn plateau_kept(v: &[f64], start: usize, end: usize, options: &DetectOptions) -> bool {
    let Some(min_prominence) = options.min_prominence else {
        return true;
    };
    let left = start.checked_sub(1).map(|i| v[i]);
    let right = v.get(end + 1).copied();
    let neighbour = match (left, right) {
        (Some(l), Some(r)) => l.max(r),
        (Some(x), None) | (None, Some(x)) => x,
        // the whole day is one plateau
        (None, None) => return true,
    };
    v[start] - neighbour >= min_prominence
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{PairIndex, PairMode};
use crate::linalg::nan_max;

/// Which closed set of correlation equations is being evolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Pure,
    /// Uniform field along the 1-direction, `η = h/γ`.
    Field {
        eta: f64,
    },
    /// Thermal spin flips with overall rate `κ/γ` and occupation `n_T`.
    Thermal {
        kappa_over_gamma: f64,
        n_t: f64,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pure => "pure",
            Self::Field { .. } => "field",
            Self::Thermal { .. } => "thermal",
        }
    }

    pub fn channels(&self) -> &'static [Channel] {
        match self {
            Self::Pure => &[Channel::C, Channel::D],
            Self::Field { .. } => &[Channel::C, Channel::D, Channel::E, Channel::F],
            Self::Thermal { .. } => &[Channel::S3, Channel::C, Channel::D],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") })
            }
        };
        match *self {
            Self::Pure => Ok(()),
            Self::Field { eta } => check("eta", eta),
            Self::Thermal { kappa_over_gamma, n_t } => {
                check("kappa_over_gamma", kappa_over_gamma)?;
                check("n_t", n_t)
            }
        }
    }
}

/// A tracked correlation function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    /// `⟨s³_x⟩`
    S3,
    /// `⟨s⁺_x s⁻_y + s⁻_x s⁺_y⟩`
    C,
    /// `⟨s³_x s³_y⟩`
    D,
    /// `⟨s²_x s³_y + s³_x s²_y⟩`
    E,
    /// `⟨s²_x s²_y⟩`
    F,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Self::S3 => "S3",
            Self::C => "C",
            Self::D => "D",
            Self::E => "E",
            Self::F => "F",
        }
    }

    pub fn is_site(self) -> bool {
        self == Self::S3
    }

    /// Fixed value at coincident sites.
    pub fn diagonal(self) -> f64 {
        match self {
            Self::C => 1.0,
            Self::D | Self::F => 0.25,
            Self::E | Self::S3 => 0.0,
        }
    }

    /// Physical bound on the magnitude of any entry.
    pub fn bound(self) -> f64 {
        match self {
            Self::C | Self::E => 1.0,
            Self::D | Self::F => 0.25,
            Self::S3 => 0.5,
        }
    }
}

/// Placement of each channel in the flat state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub mode: PairMode,
    pub n_sites: usize,
    pub n_pairs: usize,
    pub n_site_classes: usize,
    pub channels: Vec<Channel>,
    offsets: Vec<usize>,
    dim: usize,
}

impl ChannelLayout {
    pub fn new(scenario: &Scenario, index: &PairIndex) -> Self {
        let channels = scenario.channels().to_vec();
        let (n_pairs, n_site_classes) = (index.len(), index.n_site_classes());
        let mut offsets = Vec::with_capacity(channels.len());
        let mut dim = 0;
        for ch in &channels {
            offsets.push(dim);
            dim += if ch.is_site() { n_site_classes } else { n_pairs };
        }
        Self { mode: index.mode(), n_sites: index.n_sites(), n_pairs, n_site_classes, channels, offsets, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len_of(&self, ch: Channel) -> usize {
        if ch.is_site() {
            self.n_site_classes
        } else {
            self.n_pairs
        }
    }

    pub fn offset(&self, ch: Channel) -> Option<usize> {
        self.channels.iter().position(|&c| c == ch).map(|i| self.offsets[i])
    }

    pub fn range(&self, ch: Channel) -> Option<std::ops::Range<usize>> {
        self.offset(ch).map(|o| o..o + self.len_of(ch))
    }

    /// Channel owning a flat index.
    pub fn channel_at(&self, i: usize) -> Channel {
        let k = self.offsets.iter().rposition(|&o| o <= i).expect("index within layout");
        self.channels[k]
    }
}

/// Off-diagonal correlation values at one instant. Diagonal constants are implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationState {
    pub scenario: Scenario,
    pub tau: f64,
    pub layout: ChannelLayout,
    pub values: Vec<f64>,
}

impl CorrelationState {
    pub fn channel(&self, ch: Channel) -> Option<&[f64]> {
        self.layout.range(ch).map(|r| &self.values[r])
    }

    pub fn channel_mut(&mut self, ch: Channel) -> Option<&mut [f64]> {
        self.layout.range(ch).map(move |r| &mut self.values[r])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest violation of the physical bounds `|C|, |E| ≤ 1`, `|4D|, |4F| ≤ 1`, `|S3| ≤ ½`.
    pub fn bound_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for &ch in &self.layout.channels {
            for v in self.channel(ch).unwrap_or(&[]) {
                worst = nan_max(worst, v.abs() - ch.bound());
            }
        }
        worst.max(0.0)
    }

    pub fn check_bounds(&self, tol: f64) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("correlation state"));
        }
        let v = self.bound_violation();
        if !(v <= tol) {
            return Err(Error::InvariantViolation(format!("correlation bound exceeded by {v:e} at tau={}", self.tau)));
        }
        Ok(())
    }
}

fn filled(scenario: Scenario, layout: ChannelLayout, fill: impl Fn(Channel) -> f64) -> CorrelationState {
    let mut values = vec![0.0; layout.dim()];
    for &ch in &layout.channels {
        let r = layout.range(ch).expect("channel in layout");
        values[r].iter_mut().for_each(|v| *v = fill(ch));
    }
    CorrelationState { scenario, tau: 0.0, layout, values }
}

/// Fully mixed state: every off-diagonal correlation and the magnetization vanish.
pub fn infinite_temperature(scenario: Scenario, index: &PairIndex) -> CorrelationState {
    filled(scenario, ChannelLayout::new(&scenario, index), |_| 0.0)
}

/// Product state with every spin down.
pub fn all_down(scenario: Scenario, index: &PairIndex) -> CorrelationState {
    filled(scenario, ChannelLayout::new(&scenario, index), |ch| match ch {
        Channel::D => 0.25,
        Channel::S3 => -0.5,
        _ => 0.0,
    })
}

/// State from explicit channel values, one slice per channel in layout order.
pub fn custom_state(
    scenario: Scenario,
    index: &PairIndex,
    channels: &[(Channel, Vec<f64>)],
) -> Result<CorrelationState> {
    let mut state = infinite_temperature(scenario, index);
    for (ch, vals) in channels {
        let n = state.layout.len_of(*ch);
        let slot = state
            .channel_mut(*ch)
            .ok_or_else(|| Error::InvalidParameter { name: "channel", reason: format!("{} not tracked", ch.name()) })?;
        if vals.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: vals.len() });
        }
        slot.copy_from_slice(vals);
    }
    if state.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("custom state"));
    }
    Ok(state)
}

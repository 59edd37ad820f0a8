use super::density::{expectation, DensityMatrix};
use super::operators::Observable;
use crate::correlation::{Channel, CorrelationState, Generator};
use crate::error::{Error, Result};

fn observable(ch: Channel, x: usize, y: usize) -> Observable {
    match ch {
        Channel::S3 => Observable::spin(x, 3),
        Channel::C => Observable::c(x, y),
        Channel::D => Observable::d(x, y),
        Channel::E => Observable::e(x, y),
        Channel::F => Observable::f(x, y),
    }
}

fn real(rho: &DensityMatrix, obs: &Observable) -> Result<f64> {
    let v = expectation(rho, obs)?;
    if !(v.im.abs() <= 1e-12) {
        return Err(Error::InvariantViolation(format!("Hermitian observable has imaginary part {:e}", v.im)));
    }
    Ok(v.re)
}

/// Row-major `N × N` matrix of a pair channel including its diagonal, or the `N` site values of `S3`.
pub fn channel_matrix(rho: &DensityMatrix, ch: Channel) -> Result<Vec<f64>> {
    let n = rho.n_sites();
    if ch.is_site() {
        return (0..n).map(|x| real(rho, &observable(ch, x, x))).collect();
    }
    let mut out = vec![0.0; n * n];
    for x in 0..n {
        for y in x..n {
            let v = real(rho, &observable(ch, x, y))?;
            out[x * n + y] = v;
            out[y * n + x] = v;
        }
    }
    Ok(out)
}

/// Reads every channel of `g`'s layout off `rho` at the class representatives.
pub fn channels_from_density(rho: &DensityMatrix, g: &Generator, tau: f64) -> Result<CorrelationState> {
    let index = g.index();
    if rho.n_sites() != index.n_sites() {
        return Err(Error::DimensionMismatch { expected: index.n_sites(), actual: rho.n_sites() });
    }
    let layout = g.layout().clone();
    let mut values = vec![0.0; layout.dim()];
    for &ch in &layout.channels {
        let range = layout.range(ch).expect("channel");
        for (k, slot) in values[range].iter_mut().enumerate() {
            *slot = if ch.is_site() {
                real(rho, &observable(ch, index.site_representative(k), 0))?
            } else {
                let (x, y) = index.representative(k);
                real(rho, &observable(ch, x, y))?
            };
        }
    }
    Ok(CorrelationState { scenario: g.scenario(), tau, layout, values })
}

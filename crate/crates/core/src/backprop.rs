//! Analytic gradients for both halves of the hybrid model.
//!
//! The optical part is a matrix-free reverse sweep: the adjoint hop is the
//! conjugate transfer function, so no dense propagation matrix is ever built.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::{ForwardTrace, OpticalStack};
use crate::readout::{relu_slope, HeadMode, ReadoutNetwork, ReadoutTrace};

/// `dL/d(head outputs)`: the softmax spectrum and, in complex mode, the raw phase angles.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadGradient {
    pub weights: Vec<f64>,
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicGradients {
    /// `delta_q = dL/dz_q` per layer.
    pub deltas: Vec<Vec<f64>>,
    pub d_weights: Vec<Vec<f64>>,
    pub d_bias: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalGradients {
    /// `dL = Re sum(d_transmission * dT)` for a complex perturbation `dT` of layer p.
    pub d_transmission: Vec<Vec<Complex64>>,
    pub d_phase: Vec<Vec<f64>>,
    pub d_theta: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    pub electronic: ElectronicGradients,
    pub d_detector: Vec<f64>,
    pub optical: OpticalGradients,
}

/// `delta_N` from the head gradient through the full softmax Jacobian
/// `(diag(s) - s s^T) / T`, plus the `atan2` chain in complex mode.
pub fn head_delta(net: &ReadoutNetwork, z: &[f64], grad: &HeadGradient) -> Result<Vec<f64>> {
    let k = net.basis.count();
    if z.len() != net.head.output_width(&net.basis) || grad.weights.len() != k {
        return Err(Error::Dimension(format!(
            "head gradient has {} entries for {} outputs",
            grad.weights.len(),
            k
        )));
    }
    let out = net.head_output(z)?;
    let s = &out.weights;
    let dot: f64 = s.iter().zip(&grad.weights).map(|(a, b)| a * b).sum();
    let mut delta: Vec<f64> = s.iter().zip(&grad.weights).map(|(si, gi)| si * (gi - dot) / net.temperature).collect();
    if net.head == HeadMode::Complex {
        delta.resize(3 * k, 0.0);
        if let Some(gp) = &grad.phases {
            if gp.len() != k {
                return Err(Error::Dimension(format!("phase gradient has {} entries for {k} charges", gp.len())));
            }
            for i in 0..k {
                let (u, v) = (z[k + 2 * i], z[k + 2 * i + 1]);
                let r2 = u * u + v * v;
                if r2 > 0.0 {
                    delta[k + 2 * i] = -gp[i] * v / r2;
                    delta[k + 2 * i + 1] = gp[i] * u / r2;
                }
            }
        }
    }
    Ok(delta)
}

/// `delta_q = (W_{q+1}^T delta_{q+1}) * relu'(z_q)`, given `delta_N`.
pub fn backward_deltas(net: &ReadoutNetwork, trace: &ReadoutTrace, delta_n: Vec<f64>) -> Result<Vec<Vec<f64>>> {
    let depth = net.layers.len();
    if trace.pre.len() != depth || trace.act.len() != depth {
        return Err(Error::Dimension(format!("trace covers {} layers, network has {depth}", trace.pre.len())));
    }
    if delta_n.len() != net.layers[depth - 1].outputs {
        return Err(Error::Dimension(format!("output error has {} entries", delta_n.len())));
    }
    let mut deltas = vec![Vec::new(); depth];
    deltas[depth - 1] = delta_n;
    for q in (0..depth - 1).rev() {
        let back = transpose_mul(&net.layers[q + 1].weights, net.layers[q + 1].inputs, &deltas[q + 1]);
        deltas[q] = back.iter().zip(&trace.pre[q]).map(|(b, z)| b * relu_slope(*z)).collect();
    }
    Ok(deltas)
}

/// `W^T d` for a row-major `W` with `cols` columns.
fn transpose_mul(w: &[f64], cols: usize, d: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (row, dr) in w.chunks_exact(cols).zip(d) {
        if *dr != 0.0 {
            out.iter_mut().zip(row).for_each(|(o, x)| *o += x * dr);
        }
    }
    out
}

/// Error chain plus `dL/dW_q = delta_q A_{q-1}^T` and `dL/dB_q = delta_q`.
pub fn backward_electronic(net: &ReadoutNetwork, trace: Option<&ReadoutTrace>, grad: &HeadGradient) -> Result<ElectronicGradients> {
    let trace = trace.ok_or(Error::MissingTrace("readout"))?;
    let z_n = trace.pre.last().ok_or(Error::MissingTrace("readout"))?;
    let deltas = backward_deltas(net, trace, head_delta(net, z_n, grad)?)?;
    let d_weights = deltas
        .iter()
        .zip(&trace.act)
        .map(|(d, a)| d.iter().flat_map(|di| a.iter().map(move |aj| di * aj)).collect())
        .collect();
    let d_bias = deltas.clone();
    Ok(ElectronicGradients { deltas, d_weights, d_bias })
}

/// `dL/dA_0 = g W_1^T delta_1`, where `g` is the readout's input gain.
pub fn backward_to_detector(net: &ReadoutNetwork, delta_1: &[f64]) -> Result<Vec<f64>> {
    let first = &net.layers[0];
    if delta_1.len() != first.outputs {
        return Err(Error::Dimension(format!(
            "first-layer error has {} entries, layer has {}",
            delta_1.len(),
            first.outputs
        )));
    }
    let mut out = transpose_mul(&first.weights, first.inputs, delta_1);
    out.iter_mut().for_each(|v| *v *= net.input_gain);
    Ok(out)
}

/// Reverse sweep from the detector error to every layer's transmission and theta.
pub fn backward_optical(stack: &OpticalStack, trace: Option<&ForwardTrace>, d_detector: &[f64]) -> Result<OpticalGradients> {
    let trace = trace.ok_or(Error::MissingTrace("optical"))?;
    let m = stack.depth();
    let n2 = stack.grid.len();
    if trace.pre.len() != m || trace.post.len() != m || trace.output.len() != n2 {
        return Err(Error::Dimension(format!("trace covers {} layers, stack has {m}", trace.pre.len())));
    }
    if d_detector.len() != n2 {
        return Err(Error::Dimension(format!("detector error has {} pixels, grid has {n2}", d_detector.len())));
    }
    let seed: Vec<Complex64> = trace.output.iter().zip(d_detector).map(|(e, g)| e * *g).collect();
    let mut g = stack.hop.apply(&seed, true);
    let mut d_transmission = vec![Vec::new(); m];
    let mut d_phase = vec![Vec::new(); m];
    let mut d_theta = vec![Vec::new(); m];
    for p in (0..m).rev() {
        let layer = &stack.layers[p];
        d_transmission[p] = g.iter().zip(&trace.pre[p]).map(|(gi, e)| 2.0 * gi.conj() * e).collect();
        d_phase[p] = g
            .iter()
            .zip(&trace.post[p])
            .map(|(gi, e)| 2.0 * (Complex64::i() * gi.conj() * e).re)
            .collect();
        d_theta[p] = d_phase[p].iter().enumerate().map(|(i, d)| d * layer.phase_slope_at(i)).collect();
        if p > 0 {
            let back: Vec<Complex64> = g
                .iter()
                .enumerate()
                .map(|(i, gi)| gi * Complex64::from_polar(1.0, -layer.phase_at(i)))
                .collect();
            g = stack.hop.apply(&back, true);
        }
    }
    Ok(OpticalGradients {
        d_transmission,
        d_phase,
        d_theta,
    })
}

/// Dense reference for `dL/dT_p`: `2 J_p^T (g * conj(E_out))` with
/// `J_p = D (prod_{i>p} diag(T_i) D) diag(E_p)`. Only meant for tiny grids.
pub fn dense_transmission_gradient(stack: &OpticalStack, trace: &ForwardTrace, d_detector: &[f64], p: usize) -> Result<Vec<Complex64>> {
    let n2 = stack.grid.len();
    if n2 > 256 {
        return Err(Error::InvalidParameter(format!("dense reference limited to 256 samples, grid has {n2}")));
    }
    // Columns of D from unit vectors, stored column-major.
    let mut d = vec![Complex64::new(0.0, 0.0); n2 * n2];
    for c in 0..n2 {
        let mut unit = vec![Complex64::new(0.0, 0.0); n2];
        unit[c] = Complex64::new(1.0, 0.0);
        d[c * n2..(c + 1) * n2].copy_from_slice(&stack.hop.apply(&unit, false));
    }
    let at = |m: &[Complex64], r: usize, c: usize| m[c * n2 + r];
    // J starts as D diag(E_p) and picks up diag(T_i) D for every later layer.
    let mut j: Vec<Complex64> = (0..n2 * n2).map(|k| d[k] * trace.pre[p][k / n2]).collect();
    for layer in &stack.layers[p + 1..] {
        let t = layer.transmission();
        let mut next = vec![Complex64::new(0.0, 0.0); n2 * n2];
        for c in 0..n2 {
            for r in 0..n2 {
                next[c * n2 + r] = (0..n2).map(|k| at(&d, r, k) * t[k] * at(&j, k, c)).sum();
            }
        }
        j = next;
    }
    let w: Vec<Complex64> = trace.output.iter().zip(d_detector).map(|(e, g)| e.conj() * *g).collect();
    Ok((0..n2).map(|c| 2.0 * (0..n2).map(|r| at(&j, r, c) * w[r]).sum::<Complex64>()).collect())
}

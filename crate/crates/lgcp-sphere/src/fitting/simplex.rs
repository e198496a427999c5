/// Outcome of a Nelder-Mead run in the optimizer's own coordinates.
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub n_evals: usize,
    pub converged: bool,
    /// Best vertex after every iteration that improved it.
    pub trace: Vec<(Vec<f64>, f64)>,
}

/// Derivative-free Nelder-Mead minimization with the standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2).
///
/// Non-finite objective values are treated as +infinity so the simplex backs
/// away from invalid regions. Converged means the simplex diameter in the
/// infinity norm dropped below `tol`; on a flat plateau every move ends in a
/// shrink, so the diameter still contracts geometrically.
pub(crate) fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> SimplexResult {
    let d = x0.len();
    assert!(d > 0, "need at least one coordinate");
    let mut n_evals = 0;
    let mut eval = |x: &[f64], n: &mut usize| -> f64 {
        *n += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    verts.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(|v| eval(v, &mut n_evals)).collect();

    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        // Sort vertices by objective value, best first.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| verts[i].clone()).collect();
        let revals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        verts = reordered;
        vals = revals;

        if trace.last().map(|(_, v)| vals[0] < *v).unwrap_or(true) {
            trace.push((verts[0].clone(), vals[0]));
        }

        let diameter = verts[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&verts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|j| verts[..d].iter().map(|v| v[j]).sum::<f64>() / d as f64)
            .collect();
        let worst = verts[d].clone();
        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = eval(&reflected, &mut n_evals);
        if fr < vals[0] {
            let expanded = blend(2.0);
            let fe = eval(&expanded, &mut n_evals);
            if fe < fr {
                verts[d] = expanded;
                vals[d] = fe;
            } else {
                verts[d] = reflected;
                vals[d] = fr;
            }
            continue;
        }
        if fr < vals[d - 1] {
            verts[d] = reflected;
            vals[d] = fr;
            continue;
        }
        let contracted = if fr < vals[d] { blend(0.5) } else { blend(-0.5) };
        let fc = eval(&contracted, &mut n_evals);
        if fc < fr.min(vals[d]) {
            verts[d] = contracted;
            vals[d] = fc;
            continue;
        }
        for i in 1..=d {
            for j in 0..d {
                verts[i][j] = verts[0][j] + 0.5 * (verts[i][j] - verts[0][j]);
            }
            vals[i] = eval(&verts[i], &mut n_evals);
        }
    }

    let best = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("simplex is nonempty");
    if trace.last().map(|(_, v)| vals[best] < *v).unwrap_or(true) {
        trace.push((verts[best].clone(), vals[best]));
    }
    SimplexResult {
        x: verts[best].clone(),
        value: vals[best],
        n_evals,
        converged,
        trace,
    }
}

//! Dormand–Prince 8(5,3) with Hairer's step-size controller, for systems
//! `y' = f(t, y)` whose state is a fixed-size array of complex numbers and whose
//! independent variable is real (an arclength along a contour).

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("integration interrupted at t = {t}: {reason}")]
    Interrupted { t: f64, reason: String },
    #[error("invalid integration interval [{t0}, {t1}]")]
    BadInterval { t0: f64, t1: f64 },
}

/// Tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on `|h|`.
    pub h_max: f64,
    /// First trial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 2_000_000,
        }
    }
}

/// Work counters for one call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

/// What an observer wants after seeing an accepted step.
pub enum Control {
    Continue,
    Stop(String),
}

// Butcher tableau, weights and error coefficients (Hairer, Nørsett & Wanner).
const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

type State<const N: usize> = [Complex64; N];

#[inline]
fn lincomb<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o += acc * h;
    }
    out
}

fn weighted_norm<const N: usize>(v: &State<N>, y: &State<N>, o: &Options) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sk = o.atol + o.rtol * y[i].norm();
        s += (v[i].norm() / sk).powi(2);
    }
    (s / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, t: f64, y: &State<N>, f0: &State<N>, span: f64, o: &Options) -> f64
where
    F: FnMut(f64, &State<N>) -> State<N>,
{
    let d0 = weighted_norm(y, y, o);
    let d1 = weighted_norm(f0, y, o);
    let mut h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(o.h_max).min(span);
    let y1 = lincomb(y, h, &[(1.0, f0)]);
    let f1 = f(t + h, &y1);
    let mut diff = f1;
    for i in 0..N {
        diff[i] -= f0[i];
    }
    let d2 = weighted_norm(&diff, y, o) / h;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / m).powf(1.0 / 8.0) };
    (100.0 * h).min(h1).min(o.h_max).min(span)
}

/// Integrate from `t0` to `t1 >= t0`.
///
/// `observe` is called after every accepted step with the new `(t, y)` and may
/// stop the integration (reported as [`OdeError::Interrupted`]).
pub fn integrate_observed<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: State<N>,
    t1: f64,
    opts: &Options,
    mut observe: O,
) -> Result<(State<N>, Stats), OdeError>
where
    F: FnMut(f64, &State<N>) -> State<N>,
    O: FnMut(f64, &State<N>) -> Control,
{
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(OdeError::BadInterval { t0, t1 });
    }
    let mut stats = Stats::default();
    if t1 == t0 {
        return Ok((y0, stats));
    }
    const SAFE: f64 = 0.9;
    const FAC_MIN: f64 = 1.0 / 3.0; // largest shrink is a factor 6, largest growth 3
    const FAC_MAX: f64 = 6.0;
    let expo = 1.0 / 8.0;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = match opts.h_init {
        Some(h) => h.min(opts.h_max).min(t1 - t0),
        None => {
            stats.evaluations += 1;
            initial_step(&mut f, t, &y, &k1, t1 - t0, opts)
        }
    };
    let mut last_rejected = false;
    let h_floor = |t: f64| 1e-14 * t.abs().max(1.0);

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps { t, max_steps: opts.max_steps });
        }
        if h < h_floor(t) {
            return Err(OdeError::StepUnderflow { t, h });
        }
        let last = t + h >= t1 - h_floor(t1);
        if last {
            h = t1 - t;
        }

        let y1 = lincomb(&y, h, &[(A21, &k1)]);
        let k2 = f(t + C2 * h, &y1);
        let y1 = lincomb(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(t + C3 * h, &y1);
        let y1 = lincomb(&y, h, &[(A41, &k1), (A43, &k3)]);
        let k4 = f(t + C4 * h, &y1);
        let y1 = lincomb(&y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]);
        let k5 = f(t + C5 * h, &y1);
        let y1 = lincomb(&y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]);
        let k6 = f(t + C6 * h, &y1);
        let y1 = lincomb(&y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + C7 * h, &y1);
        let y1 = lincomb(&y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]);
        let k8 = f(t + C8 * h, &y1);
        let y1 = lincomb(
            &y,
            h,
            &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
        );
        let k9 = f(t + C9 * h, &y1);
        let y1 = lincomb(
            &y,
            h,
            &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
        );
        let k10 = f(t + C10 * h, &y1);
        let y1 = lincomb(
            &y,
            h,
            &[
                (A111, &k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        );
        let k11 = f(t + C11 * h, &y1);
        let y1 = lincomb(
            &y,
            h,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        );
        let k12 = f(t + h, &y1);
        stats.evaluations += 11;

        let y_new = lincomb(
            &y,
            h,
            &[(B1, &k1), (B6, &k6), (B7, &k7), (B8, &k8), (B9, &k9), (B10, &k10), (B11, &k11), (B12, &k12)],
        );

        // Fifth-order and third-order error estimates, combined as in DOP853.
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..N {
            let sk = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let slope = B1 * k1[i] + B6 * k6[i] + B7 * k7[i] + B8 * k8[i] + B9 * k9[i] + B10 * k10[i]
                + B11 * k11[i] + B12 * k12[i];
            let e3 = slope - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
            let e5 = ER1 * k1[i] + ER6 * k6[i] + ER7 * k7[i] + ER8 * k8[i] + ER9 * k9[i] + ER10 * k10[i]
                + ER11 * k11[i] + ER12 * k12[i];
            err3 += (e3.norm() / sk).powi(2);
            err5 += (e5.norm() / sk).powi(2);
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err5 * (1.0 / (deno * N as f64)).sqrt();

        if !err.is_finite() || !y_new.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            stats.rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }

        let fac11 = err.powf(expo);
        let fac = (fac11 / SAFE).clamp(FAC_MIN, FAC_MAX);
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + h };
            y = y_new;
            if let Control::Stop(reason) = observe(t, &y) {
                return Err(OdeError::Interrupted { t, reason });
            }
            if last {
                return Ok((y, stats));
            }
            k1 = f(t, &y);
            stats.evaluations += 1;
            h_new = h_new.min(opts.h_max);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFE).min(FAC_MAX);
        }
    }
}

/// [`integrate_observed`] without an observer.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: State<N>,
    t1: f64,
    opts: &Options,
) -> Result<(State<N>, Stats), OdeError>
where
    F: FnMut(f64, &State<N>) -> State<N>,
{
    integrate_observed(f, t0, y0, t1, opts, |_, _| Control::Continue)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        let rows: [(&[f64], f64); 10] = [
            (&[A21], C2),
            (&[A31, A32], C3),
            (&[A41, A43], C4),
            (&[A51, A53, A54], C5),
            (&[A61, A64, A65], C6),
            (&[A71, A74, A75, A76], C7),
            (&[A81, A84, A85, A86, A87], C8),
            (&[A91, A94, A95, A96, A97, A98], C9),
            (&[A101, A104, A105, A106, A107, A108, A109], C10),
            (&[A111, A114, A115, A116, A117, A118, A119, A1110], C11),
        ];
        for (row, c) in rows {
            assert!((row.iter().sum::<f64>() - c).abs() < 1e-14, "node {c}");
        }
        let last = [A121, A124, A125, A126, A127, A128, A129, A1210, A1211];
        assert!((last.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let b = [B1, B6, B7, B8, B9, B10, B11, B12];
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((BHH1 + BHH2 + BHH3 - 1.0).abs() < 1e-14);
        let er = [ER1, ER6, ER7, ER8, ER9, ER10, ER11, ER12];
        assert!(er.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn rotation_is_integrated_to_tolerance() {
        let i = Complex64::i();
        let (y, stats) = integrate(|_, y: &[Complex64; 1]| [i * y[0]], 0.0, [Complex64::new(1.0, 0.0)], 50.0, &Options::default()).unwrap();
        let exact = Complex64::new(50f64.cos(), 50f64.sin());
        assert!((y[0] - exact).norm() < 1e-10, "{}", (y[0] - exact).norm());
        assert!(stats.accepted > 10 && stats.evaluations > 12 * stats.accepted);
    }

    #[test]
    fn zero_length_interval_is_identity() {
        let y0 = [Complex64::new(3.0, -1.0)];
        let (y, stats) = integrate(|_, y: &[Complex64; 1]| *y, 2.0, y0, 2.0, &Options::default()).unwrap();
        assert_eq!(y, y0);
        assert_eq!(stats.accepted, 0);
        assert!(integrate(|_, y: &[Complex64; 1]| *y, 2.0, y0, 1.0, &Options::default()).is_err());
    }

    #[test]
    fn blow_up_is_reported_not_stepped_over() {
        // y' = y^2, y(0) = 1 has a pole at t = 1.
        let r = integrate(|_, y: &[Complex64; 1]| [y[0] * y[0]], 0.0, [Complex64::new(1.0, 0.0)], 2.0, &Options::default());
        assert!(matches!(r, Err(OdeError::StepUnderflow { .. }) | Err(OdeError::TooManySteps { .. })), "{r:?}");
    }

    #[test]
    fn observer_can_stop() {
        let r = integrate_observed(
            |_, y: &[Complex64; 1]| *y,
            0.0,
            [Complex64::new(1.0, 0.0)],
            10.0,
            &Options::default(),
            |_, y| if y[0].norm() > 100.0 { Control::Stop("too large".into()) } else { Control::Continue },
        );
        match r {
            Err(OdeError::Interrupted { t, .. }) => assert!(t > 4.0 && t < 5.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_ceiling_is_respected() {
        let mut last_t = 0.0;
        let mut max_h: f64 = 0.0;
        integrate_observed(
            |_, _y: &[Complex64; 1]| [Complex64::new(0.0, 0.0)],
            0.0,
            [Complex64::new(1.0, 0.0)],
            10.0,
            &Options::default().h_max(0.5),
            |t, _| {
                max_h = max_h.max(t - last_t);
                last_t = t;
                Control::Continue
            },
        )
        .unwrap();
        assert!(max_h <= 0.5 + 1e-12);
    }
}

use crate::svg;
use crate::table::{Cell, Table};
use crate::ExperimentArgs;
use anyhow::{anyhow, bail, Result};
use qdp_core::analysis::{self, TypicalSetSpec};
use qdp_core::noise::FieldDescriptor;
use qdp_core::rank::{big_ln, gaussian_binomial};
use qdp_core::sampler::{self, MinWeightConfig};
use qdp_core::{pgm, verify, Caps, FieldSpec, NoiseSpec, QdpError};
use serde_json::Value;

pub struct Output {
    pub table: Table,
    pub svg: String,
}

/// Validated experiment settings.
pub struct Context {
    pub field: FieldSpec,
    pub noise: NoiseSpec,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub rate: Option<f64>,
    pub eps: f64,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub margin: f64,
    pub caps: Caps,
    command: String,
}

fn resolve_field(args: &ExperimentArgs, carried: Option<FieldDescriptor>) -> Result<FieldSpec> {
    let field = match (args.q, carried) {
        (Some(q), Some(d)) => {
            let f = FieldSpec::new(d.p, d.s)?;
            if f.q() != q {
                bail!("--q {q} disagrees with the noise field {}^{}", d.p, d.s);
            }
            f
        }
        (Some(q), None) => FieldSpec::with_order(q)?,
        (None, Some(d)) => FieldSpec::new(d.p, d.s)?,
        (None, None) => FieldSpec::with_order(2)?,
    };
    if let Some(s) = args.s {
        if s != field.s() {
            bail!("--s {s} disagrees with q = {} = {}^{}", field.q(), field.p(), field.s());
        }
    }
    Ok(field)
}

impl Context {
    pub fn resolve(command: &str, args: &ExperimentArgs) -> Result<Self> {
        let (noise, carried) = NoiseSpec::parse(&args.noise)?;
        let field = resolve_field(args, carried)?;
        let n = match (args.n, noise.fixed_length()) {
            (Some(n), Some(m)) if n != m => bail!("--n {n} disagrees with the rank noise length {m}"),
            (n, m) => n.or(m),
        };
        if n == Some(0) {
            bail!("--n must be at least 1");
        }
        if let Some(r) = args.rate {
            if !(r > 0.0 && r < 1.0) {
                bail!("--rate must lie in (0, 1)");
            }
        }
        let k = match (args.k, args.rate, n) {
            (Some(k), _, _) => Some(k),
            (None, Some(r), Some(n)) => Some((r * n as f64 + 1e-9).floor() as usize),
            _ => None,
        };
        if let (Some(k), Some(n)) = (k, n) {
            if k == 0 || k >= n {
                bail!("need 1 <= k < n, got k = {k}, n = {n}");
            }
        }
        if !(args.eps.is_finite() && args.eps > 0.0) {
            bail!("--eps must be positive");
        }
        if args.trials == 0 || args.samples == 0 {
            bail!("--trials and --samples must be at least 1");
        }
        if !(args.margin.is_finite() && args.margin >= 0.0) {
            bail!("--margin must be non-negative");
        }
        Ok(Self {
            field,
            noise,
            n,
            k,
            rate: args.rate,
            eps: args.eps,
            trials: args.trials,
            samples: args.samples,
            seed: args.seed,
            margin: args.margin,
            caps: Caps::from_env()?,
            command: command.to_string(),
        })
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| anyhow!("{} needs --n", self.command))
    }

    fn need_k(&self) -> Result<usize> {
        self.k.ok_or_else(|| anyhow!("{} needs --k or --rate", self.command))
    }

    fn noise_label(&self) -> String {
        match self.noise.param_label() {
            l if l.is_empty() => self.noise.kind().to_string(),
            l => format!("{}:{l}", self.noise.kind()),
        }
    }

    /// Typical set of the spectrum `|f̂|²`, when the noise has one.
    fn typical_set(&self, n: usize) -> Result<Option<TypicalSetSpec>> {
        if let Some(params) = self.noise.rank_params(&self.field)? {
            return Ok(Some(analysis::typical_set_rank(&params, self.eps)?));
        }
        let g = self.noise.symbol_amplitudes::<f64>(&self.field)?.expect("per-symbol noise");
        let r: Vec<f64> = qdp_core::spectral::dft_product(&self.field, &g)?.iter().map(|z| z.norm_sqr()).collect();
        Ok(Some(analysis::typical_set_product(&r, self.field.q(), n, self.eps)?))
    }

    /// Per-symbol entropy of the spectrum, the rate threshold.
    fn capacity(&self) -> Result<f64> {
        if let Some(params) = self.noise.rank_params(&self.field)? {
            return Ok(analysis::rank_entropy_per_symbol(&params).1);
        }
        let g = self.noise.symbol_amplitudes::<f64>(&self.field)?.expect("per-symbol noise");
        Ok(analysis::holevo_capacity(&self.field, &g)?)
    }

    pub fn config_json(&self, args: &ExperimentArgs) -> Result<Value> {
        let mut v = serde_json::to_value(args)?;
        let obj = v.as_object_mut().expect("struct serializes to an object");
        obj.insert("command".into(), Value::from(self.command.clone()));
        obj.insert("field".into(), serde_json::json!({ "p": self.field.p(), "s": self.field.s() }));
        obj.insert("noise".into(), serde_json::to_value(&self.noise)?);
        obj.insert("n".into(), serde_json::to_value(self.n)?);
        obj.insert("k".into(), serde_json::to_value(self.k)?);
        Ok(v)
    }
}

pub fn capacity(ctx: &Context) -> Result<Output> {
    let q = ctx.field.q();
    if let Some(params) = ctx.noise.rank_params(&ctx.field)? {
        let (closed, exact) = analysis::rank_entropy_per_symbol(&params);
        let mut t = Table::new("capacity-rank", &["q", "a", "b", "t", "h_closed", "h_exact"]);
        t.push(vec![q.into(), params.a().into(), params.b().into(), params.t().into(), closed.into(), exact.into()]);
        let svg = svg::bar_plot(
            "Rank noise entropy per symbol",
            "noise",
            "entropy",
            &[ctx.noise_label()],
            &[("closed form", vec![closed]), ("exact", vec![exact])],
        );
        return Ok(Output { table: t, svg });
    }
    let g = ctx.noise.symbol_amplitudes::<f64>(&ctx.field)?.expect("per-symbol noise");
    let holevo = analysis::holevo_capacity(&ctx.field, &g)?;
    let shannon = analysis::shannon_capacity(&ctx.field, &g)?;
    let h = analysis::hirschman_check(&ctx.field, &g)?;
    let mut t = Table::new(
        "capacity",
        &["q", "noise", "holevo_capacity", "shannon_capacity", "hirschman_sum", "hirschman_holds", "hirschman_equality"],
    );
    t.push(vec![
        q.into(),
        ctx.noise_label().into(),
        holevo.into(),
        shannon.into(),
        h.sum.into(),
        h.holds.into(),
        (h.holds && h.reverse_holds).into(),
    ]);
    let svg = svg::bar_plot(
        "Per-symbol capacities",
        "noise",
        "capacity",
        &[ctx.noise_label()],
        &[("Holevo", vec![holevo]), ("Shannon", vec![shannon])],
    );
    Ok(Output { table: t, svg })
}

pub fn pgm_sweep(ctx: &Context) -> Result<Output> {
    let n = ctx.need_n()?;
    if n < 2 {
        bail!("pgm-sweep needs n >= 2");
    }
    let f = ctx.noise.amplitude::<f64>(&ctx.field, n)?;
    let points = pgm::pgm_sweep(&f, ctx.trials, ctx.seed, &ctx.caps)?;
    let typical = ctx.typical_set(n)?;
    let lq = (ctx.field.q() as f64).ln();
    let mut t = Table::new("pgm-sweep", &["n", "k", "rate", "trials", "mean", "std", "min", "max", "converse_bound"]);
    for p in points.iter().filter(|p| ctx.k.is_none_or(|k| k == p.k)) {
        let converse = typical.as_ref().map(|ts| {
            let ratio = (big_ln(&ts.cardinality) - p.k as f64 * lq).exp();
            ratio.min(1.0) + ts.defect.max(0.0).sqrt()
        });
        let lo = p.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        t.push(vec![
            n.into(),
            p.k.into(),
            (p.k as f64 / n as f64).into(),
            ctx.trials.into(),
            p.mean.into(),
            p.std.into(),
            lo.into(),
            hi.into(),
            converse.into(),
        ]);
    }
    let cap = ctx.capacity()?;
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.k as f64 / n as f64, p.mean)).collect();
    let svg = svg::line_plot(
        &format!("Mean PGM success, n = {n}, {}", ctx.noise_label()),
        "rate k/n",
        "mean P_PGM",
        &pts,
        Some((cap, &format!("capacity {cap:.4}"))),
    );
    Ok(Output { table: t, svg })
}

pub fn sample_dual(ctx: &Context) -> Result<Output> {
    let n = ctx.need_n()?;
    let k = ctx.need_k()?;
    let f = ctx.noise.amplitude::<f64>(&ctx.field, n)?;
    let cfg = MinWeightConfig {
        k,
        trials: ctx.trials,
        samples_per_seed: ctx.samples,
        master_seed: ctx.seed,
        margin: ctx.margin,
        weight: ctx.noise.weight_kind(&ctx.field)?,
    };
    let typical = ctx.typical_set(n)?;
    let rows = sampler::min_weight_experiment(&f, &cfg, typical.as_ref(), &ctx.caps)?;
    let label = ctx.noise_label();
    let mut t = Table::new(
        "sample-dual",
        &[
            "seed",
            "n",
            "k",
            "noise",
            "d_min",
            "expected_weight",
            "frac_within_margin",
            "success_floor",
            "p_zero_branch",
            "exact_within_margin",
            "argmax_is_min_weight",
            "typical_mass",
            "zero_dual_mass",
        ],
    );
    for r in &rows {
        if r.zero_dual_mass {
            eprintln!("note: seed {} has no spectral mass on the dual code", r.seed);
        }
        t.push(vec![
            r.seed.into(),
            r.n.into(),
            r.k.into(),
            label.clone().into(),
            r.d_min.into(),
            r.expected_weight.into(),
            r.frac_within_margin.into(),
            r.success_floor.into(),
            r.p_zero_branch.into(),
            r.exact_within_margin.into(),
            r.argmax_is_min_weight.into(),
            r.typical_mass.into(),
            r.zero_dual_mass.into(),
        ]);
    }
    let labels: Vec<String> = rows.iter().map(|r| r.seed.to_string()).collect();
    let svg = svg::bar_plot(
        &format!("Dual sampler weights, n = {n}, k = {k}, {label}"),
        "seed",
        "weight",
        &labels,
        &[
            ("d_min", rows.iter().map(|r| r.d_min).collect()),
            ("expected weight", rows.iter().map(|r| r.expected_weight).collect()),
        ],
    );
    Ok(Output { table: t, svg })
}

pub fn rank_lab(ctx: &Context) -> Result<Output> {
    let params = ctx
        .noise
        .rank_params(&ctx.field)?
        .ok_or_else(|| anyhow!("rank-lab needs rank noise, e.g. --noise preset:rank:2:2:1"))?;
    let q = ctx.field.q();
    let (a, b, tt) = (params.a(), params.b(), params.t());
    let mut t = Table::new("rank-lab", &["quantity", "index", "value"]);
    let top = a.min(b);
    let row = |name: &str, index: Option<usize>, value: Cell| vec![name.into(), index.into(), value];
    for u in 0..=top {
        t.push(row("gaussian_binomial", Some(u), gaussian_binomial(q, b, u).to_string().into()));
    }
    for (u, s) in params.sphere_sizes().iter().enumerate() {
        t.push(row("sphere_size", Some(u), s.to_string().into()));
    }
    let shells = params.shell_masses();
    for (u, &m) in shells.iter().enumerate() {
        t.push(row("shell_mass", Some(u), m.into()));
    }
    let dual_shells = params.dual().shell_masses();
    for (u, &m) in dual_shells.iter().enumerate() {
        t.push(row("dual_shell_mass", Some(u), m.into()));
    }
    t.push(row("norm_sq", None, params.norm_sq().to_string().into()));
    match verify::rank_duality_residual(q, a, b, tt, &ctx.caps) {
        Ok(res) => t.push(row("duality_residual", None, res.into())),
        Err(QdpError::CapExceeded { size, cap, .. }) => {
            eprintln!("note: duality check skipped, q^(ab) = {size} exceeds the cap {cap}");
        }
        Err(e) => return Err(e.into()),
    }
    let (closed, exact) = analysis::rank_entropy_per_symbol(&params);
    t.push(row("h_closed", None, closed.into()));
    t.push(row("h_exact", None, exact.into()));
    let rate = ctx.rate.or_else(|| ctx.k.map(|k| k as f64 / (a * b) as f64)).unwrap_or(0.5);
    t.push(row("gv_distance", None, analysis::rank_gv_distance(a, b, 1.0 - rate).into()));
    let labels: Vec<String> = (0..shells.len()).map(|u| u.to_string()).collect();
    let svg = svg::bar_plot(
        &format!("Rank shells, q = {q}, {a}x{b}, t = {tt}"),
        "rank u",
        "mass",
        &labels,
        &[("|f_t|^2", shells), ("|DFT f_t|^2", dual_shells)],
    );
    Ok(Output { table: t, svg })
}

use num_complex::Complex64;

use super::gates::crusher;
use super::system::SpinSystem;
use crate::error::{Error, Result};
use crate::pauli::{dense, Matrix, SpinOperator, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn symbol(self) -> Symbol {
        match self {
            Axis::X => Symbol::X,
            Axis::Y => Symbol::Y,
            Axis::Z => Symbol::Z,
        }
    }

    fn as_char(self) -> char {
        self.symbol().as_char()
    }
}

/// One step of a pulse sequence. `[θ H]` means the propagator `exp(−iθH)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    /// Ideal hard pulse `exp(−iθ Σ_k I_axisᵏ)` on the listed spins.
    Rotation { angle: f64, axis: Axis, spins: Vec<usize> },
    /// `exp(−iθG)` for an effective Hamiltonian term, e.g. `[π Iz¹Iz²]`.
    Evolution { generator: SpinOperator, angle: f64 },
    /// Free precession under the system's secular Hamiltonian.
    Delay { seconds: f64 },
    /// Gradient crusher; removes terms of nonzero net coherence order.
    Crusher { retain_zqc: bool },
}

impl Event {
    fn generator(&self, n: usize) -> Option<(SpinOperator, f64)> {
        match self {
            Event::Rotation { angle, axis, spins } => {
                let mut g = SpinOperator::zero(n);
                for &s in spins {
                    g += &SpinOperator::single(n, s, axis.symbol());
                }
                Some((g, *angle))
            }
            Event::Evolution { generator, angle } => Some((generator.clone(), *angle)),
            _ => None,
        }
    }
}

/// Ordered events; the first event acts first in time.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    n: usize,
    events: Vec<Event>,
}

impl PulseSequence {
    pub fn new(n: usize) -> Self {
        PulseSequence { n, events: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn push(&mut self, event: Event) -> Result<()> {
        self.validate(&event)?;
        self.events.push(event);
        Ok(())
    }

    fn validate(&self, event: &Event) -> Result<()> {
        match event {
            Event::Rotation { angle, spins, .. } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidArgument("rotation angle must be finite".into()));
                }
                let mut seen = 0u64;
                for &s in spins {
                    if s >= self.n {
                        return Err(Error::SpinIndex { spin: s, n: self.n });
                    }
                    if seen & (1 << s) != 0 {
                        return Err(Error::IndexClash(s + 1));
                    }
                    seen |= 1 << s;
                }
            }
            Event::Evolution { generator, angle } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidArgument("evolution angle must be finite".into()));
                }
                if generator.n() != self.n {
                    return Err(Error::DimensionMismatch(self.n, generator.n()));
                }
                if !generator.is_hermitian(1e-12) {
                    return Err(Error::NonHermitian);
                }
            }
            Event::Delay { seconds } => {
                if !seconds.is_finite() || *seconds < 0.0 {
                    return Err(Error::NegativeTime(*seconds));
                }
            }
            Event::Crusher { .. } => {}
        }
        Ok(())
    }

    /// `[angle Σ I_axis]` on `spins`.
    pub fn rotate(mut self, angle: f64, axis: Axis, spins: &[usize]) -> Result<Self> {
        self.push(Event::Rotation { angle, axis, spins: spins.to_vec() })?;
        Ok(self)
    }

    /// `[angle Izᵃ Izᵇ]`.
    pub fn zz(self, angle: f64, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::IndexClash(a + 1));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::SpinIndex { spin: a.max(b), n: self.n });
        }
        let g = SpinOperator::iz(self.n, a) * SpinOperator::iz(self.n, b);
        self.evolve(g, angle)
    }

    pub fn evolve(mut self, generator: SpinOperator, angle: f64) -> Result<Self> {
        self.push(Event::Evolution { generator, angle })?;
        Ok(self)
    }

    pub fn delay(mut self, seconds: f64) -> Result<Self> {
        self.push(Event::Delay { seconds })?;
        Ok(self)
    }

    pub fn crush(mut self, retain_zqc: bool) -> Result<Self> {
        self.push(Event::Crusher { retain_zqc })?;
        Ok(self)
    }

    /// Appends the events of `other`.
    pub fn then(mut self, other: &PulseSequence) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        self.events.extend(other.events.iter().cloned());
        Ok(self)
    }

    /// Applies the sequence to `rho`. Delays need [`PulseSequence::apply_in`].
    pub fn apply(&self, rho: &SpinOperator) -> Result<SpinOperator> {
        self.run(rho, None)
    }

    pub fn apply_in(&self, rho: &SpinOperator, system: &SpinSystem) -> Result<SpinOperator> {
        if system.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, system.n()));
        }
        self.run(rho, Some(system))
    }

    fn run(&self, rho: &SpinOperator, system: Option<&SpinSystem>) -> Result<SpinOperator> {
        if rho.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, rho.n()));
        }
        let mut out = rho.clone();
        for ev in &self.events {
            out = match ev {
                Event::Crusher { retain_zqc } => crusher(&out, *retain_zqc),
                Event::Delay { seconds } => {
                    let h = system
                        .ok_or_else(|| Error::InvalidArgument("delay needs a spin system".into()))?
                        .weak_hamiltonian();
                    out.conjugate(&h, *seconds)?
                }
                _ => {
                    let (g, angle) = ev.generator(self.n).expect("unitary event");
                    out.conjugate(&g, angle)?
                }
            };
        }
        Ok(out)
    }

    /// Dense propagator `U_k ⋯ U_1` (the last event multiplies on the left).
    pub fn compile(&self) -> Result<Matrix> {
        self.compile_in(None)
    }

    pub fn compile_with(&self, system: &SpinSystem) -> Result<Matrix> {
        self.compile_in(Some(system))
    }

    fn compile_in(&self, system: Option<&SpinSystem>) -> Result<Matrix> {
        if self.n > dense::DEFAULT_DENSE_LIMIT {
            return Err(Error::DenseLimit { n: self.n, limit: dense::DEFAULT_DENSE_LIMIT });
        }
        let dim = 1usize << self.n;
        let mut u = Matrix::identity(dim, dim);
        for ev in &self.events {
            let step = match ev {
                Event::Crusher { .. } => return Err(Error::NonUnitary),
                Event::Delay { seconds } => {
                    let h = system
                        .ok_or_else(|| Error::InvalidArgument("delay needs a spin system".into()))?
                        .weak_hamiltonian();
                    dense::expm_hermitian(&h.to_dense()?, -seconds)
                }
                _ => {
                    let (g, angle) = ev.generator(self.n).expect("unitary event");
                    dense::expm_hermitian(&g.to_dense()?, -angle)
                }
            };
            u = step * u;
        }
        Ok(u)
    }

    /// Parses the line format: `rot <deg> <x|y|z> <spin>...`, `zz <deg> <a> <b>`,
    /// `op <deg> <label>`, `delay <seconds>`, `crush [nozqc]`. Spins are 1-based.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut seq = PulseSequence::new(n);
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<f64> {
                let v = s.parse::<f64>().map_err(|e| perr(format!("'{s}': {e}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(perr(format!("'{s}' is not finite")))
                }
            };
            let spin = |s: &str| -> Result<usize> {
                let k = s.parse::<usize>().map_err(|e| perr(format!("spin '{s}': {e}")))?;
                if k == 0 || k > n {
                    return Err(perr(format!("spin {k} outside 1..={n}")));
                }
                Ok(k - 1)
            };
            let wrap = |e: Error| match e {
                Error::Parse { .. } => e,
                other => perr(other.to_string()),
            };
            match f[0] {
                "rot" => {
                    if f.len() < 4 {
                        return Err(perr("usage: rot <deg> <axis> <spin>...".into()));
                    }
                    let axis = match f[2] {
                        "x" => Axis::X,
                        "y" => Axis::Y,
                        "z" => Axis::Z,
                        a => return Err(perr(format!("unknown axis '{a}'"))),
                    };
                    let spins = f[3..].iter().map(|s| spin(s)).collect::<Result<Vec<_>>>()?;
                    seq = seq.rotate(num(f[1])?.to_radians(), axis, &spins).map_err(wrap)?;
                }
                "zz" => {
                    if f.len() != 4 {
                        return Err(perr("usage: zz <deg> <spin> <spin>".into()));
                    }
                    seq = seq.zz(num(f[1])?.to_radians(), spin(f[2])?, spin(f[3])?).map_err(wrap)?;
                }
                "op" => {
                    if f.len() != 3 {
                        return Err(perr("usage: op <deg> <label>".into()));
                    }
                    let g = SpinOperator::term(f[2], Complex64::new(1.0, 0.0)).map_err(wrap)?;
                    if g.n() != n {
                        return Err(perr(format!("label '{}' has {} spins, expected {n}", f[2], g.n())));
                    }
                    seq = seq.evolve(g, num(f[1])?.to_radians()).map_err(wrap)?;
                }
                "delay" => {
                    if f.len() != 2 {
                        return Err(perr("usage: delay <seconds>".into()));
                    }
                    seq = seq.delay(num(f[1])?).map_err(wrap)?;
                }
                "crush" => {
                    let retain = match f.get(1) {
                        None => true,
                        Some(&"nozqc") => false,
                        Some(x) => return Err(perr(format!("unknown crush option '{x}'"))),
                    };
                    seq = seq.crush(retain).map_err(wrap)?;
                }
                other => return Err(Error::Unknown { kind: "event", name: format!("{other} (line {line_no})") }),
            }
        }
        Ok(seq)
    }

    /// Writes the line format accepted by [`PulseSequence::parse`]. Multi-term
    /// generators are split into one `op` line per term, which requires the
    /// terms to commute.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for ev in &self.events {
            match ev {
                Event::Rotation { angle, axis, spins } => {
                    out += &format!("rot {} {}", angle.to_degrees(), axis.as_char());
                    for s in spins {
                        out += &format!(" {}", s + 1);
                    }
                    out.push('\n');
                }
                Event::Evolution { generator, angle } => {
                    let g = generator.to_cartesian();
                    let terms = g.sorted_terms();
                    for (i, (a, _)) in terms.iter().enumerate() {
                        if terms[i + 1..].iter().any(|(b, _)| !crate::pauli::labels_commute(*a, *b)) {
                            return Err(Error::InvalidArgument(
                                "generator with non-commuting terms has no line form".into(),
                            ));
                        }
                    }
                    for (l, v) in terms {
                        let zz = v == Complex64::new(1.0, 0.0) && l.weight() == 2 && l.longitudinal() == l.support();
                        if zz {
                            let s = l.support();
                            let a = s.trailing_zeros() + 1;
                            let b = 64 - s.leading_zeros();
                            out += &format!("zz {} {} {}\n", angle.to_degrees(), a, b);
                        } else if !l.is_identity() {
                            out += &format!("op {} {}\n", (angle * v.re).to_degrees(), l.render(self.n, g.basis()));
                        }
                    }
                }
                Event::Delay { seconds } => out += &format!("delay {seconds}\n"),
                Event::Crusher { retain_zqc } => out += if *retain_zqc { "crush\n" } else { "crush nozqc\n" },
            }
        }
        Ok(out)
    }
}

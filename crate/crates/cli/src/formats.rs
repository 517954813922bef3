//! File formats and argument grammars.

use std::io::Write;
use std::path::Path;

use adelic_qc::counterexample::Counterexample;
use adelic_qc::grid::GridField;
use adelic_qc::leaf::Profile;
use adelic_qc::plane::PlanarQCMap;
use adelic_qc::teich::SolenoidDiffeo;
use adelic_qc::{Chain, ChainKind, Complex64, Frequency, PontryaginSeries};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub num: i64,
    pub den: u64,
    pub re: f64,
    pub im: f64,
}

/// `{"reality": bool, "terms": [...]}`; `reality` defaults to false on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(default)]
    pub reality: bool,
    pub terms: Vec<TermJson>,
}

impl SeriesJson {
    pub fn from_series(s: &PontryaginSeries) -> Self {
        let terms =
            s.terms().map(|(q, a)| TermJson { num: q.num(), den: q.den(), re: a.re, im: a.im }).collect();
        SeriesJson { reality: s.reality(), terms }
    }

    pub fn to_series(&self) -> Result<PontryaginSeries, CliError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.den == 0 {
                return Err(CliError::input("term with denominator 0"));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(CliError::input("non-finite coefficient"));
            }
            terms.push((Frequency::new(t.num, t.den), Complex64::new(t.re, t.im)));
        }
        Ok(PontryaginSeries::from_terms(terms, self.reality)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainJson {
    pub kind: String,
    pub levels: Vec<u64>,
}

impl ChainJson {
    pub fn from_chain(c: &Chain) -> Self {
        let kind = match c.kind() {
            ChainKind::PAdic(p) => format!("p={p}"),
            ChainKind::Factorial => "factorial".into(),
            ChainKind::Custom => "custom".into(),
        };
        ChainJson { kind, levels: c.levels().to_vec() }
    }

    pub fn to_chain(&self) -> Result<Chain, CliError> {
        let kind = match self.kind.as_str() {
            "factorial" => ChainKind::Factorial,
            "custom" => ChainKind::Custom,
            k => match k.strip_prefix("p=").map(str::parse::<u64>) {
                Some(Ok(p)) => ChainKind::PAdic(p),
                _ => return Err(CliError::input(format!("unknown chain kind {k:?}"))),
            },
        };
        Ok(Chain::from_parts(kind, self.levels.clone())?)
    }
}

/// A circle-solenoid diffeomorphism: series JSON plus an optional chain.
#[derive(Debug, Clone, Deserialize)]
pub struct DiffeoJson {
    #[serde(flatten)]
    pub h: SeriesJson,
    pub chain: Option<ChainJson>,
}

/// `p=P`, `factorial` or `custom:n1,n2,...`; the first two take `depth` levels.
pub fn parse_chain(spec: &str, depth: usize) -> Result<Chain, CliError> {
    if spec == "factorial" {
        return Ok(Chain::factorial(depth)?);
    }
    if let Some(p) = spec.strip_prefix("p=") {
        let p = p.parse().map_err(|_| CliError::input(format!("bad base in chain {spec:?}")))?;
        return Ok(Chain::p_adic(p, depth)?);
    }
    if let Some(list) = spec.strip_prefix("custom:") {
        let levels = list
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::input(format!("bad level list in chain {spec:?}")))?;
        return Ok(Chain::custom(levels)?);
    }
    Err(CliError::input(format!("unknown chain {spec:?}; use p=P, factorial or custom:n1,n2,...")))
}

/// What `--mu` resolved to.
#[derive(Debug, Clone)]
pub enum MuInput {
    Series(PontryaginSeries),
    Counterexample(Counterexample),
    /// `k·χ_D` on the unit disk of the plane.
    Disk(f64),
}

/// Inline JSON, `constant:C`, `counterexample:N=K`, `disk:K`, or a path to a
/// series JSON file.
pub fn parse_mu(arg: &str) -> Result<MuInput, CliError> {
    let arg = arg.trim();
    if arg.starts_with('{') {
        return Ok(MuInput::Series(parse_series_json(arg)?));
    }
    if let Some(v) = arg.strip_prefix("constant:") {
        let c = parse_f64(v, "constant")?;
        return Ok(MuInput::Series(PontryaginSeries::constant(Complex64::new(c, 0.0))));
    }
    if let Some(v) = arg.strip_prefix("counterexample:") {
        let n = v.strip_prefix("N=").unwrap_or(v);
        let n = n.parse().map_err(|_| CliError::input(format!("bad truncation in {arg:?}")))?;
        return Ok(MuInput::Counterexample(Counterexample::new(n)?));
    }
    if let Some(v) = arg.strip_prefix("disk:") {
        return Ok(MuInput::Disk(parse_f64(v, "disk amplitude")?));
    }
    Ok(MuInput::Series(parse_series_json(&read_file(Path::new(arg))?)?))
}

pub fn parse_series_json(text: &str) -> Result<PontryaginSeries, CliError> {
    let j: SeriesJson = serde_json::from_str(text).map_err(|e| CliError::input(format!("series JSON: {e}")))?;
    j.to_series()
}

/// Inline JSON or a path; falls back to `chain` when the document has none.
pub fn parse_diffeo(arg: &str, chain: Option<Chain>) -> Result<SolenoidDiffeo, CliError> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { read_file(Path::new(arg))? };
    let j: DiffeoJson = serde_json::from_str(&text).map_err(|e| CliError::input(format!("diffeomorphism JSON: {e}")))?;
    let chain = match (&j.chain, chain) {
        (Some(c), _) => c.to_chain()?,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::input("no chain: give one in the document or with --chain")),
    };
    let h = j.h.to_series()?;
    Ok(SolenoidDiffeo::new(h, chain)?)
}

/// `bump:LO,HI`, `box:LO,HI` or `gaussian:CENTER,WIDTH`.
pub fn parse_profile(spec: &str) -> Result<Profile, CliError> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| CliError::input(format!("bad profile {spec:?}")))?;
    let (a, b) = rest.split_once(',').ok_or_else(|| CliError::input(format!("bad profile {spec:?}")))?;
    let (a, b) = (parse_f64(a, "profile")?, parse_f64(b, "profile")?);
    let p = match kind {
        "bump" => Profile::Bump { lo: a, hi: b },
        "box" => Profile::Box { lo: a, hi: b },
        "gaussian" => Profile::Gaussian { center: a, width: b },
        _ => return Err(CliError::input(format!("unknown profile kind {kind:?}"))),
    };
    p.validate()?;
    Ok(p)
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::input(format!("bad {what} {s:?}"))),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Raw samples on the cell centers of `[-R, R]²`, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub half_width: f64,
    pub n: usize,
    pub support_radius: f64,
    pub values: Vec<Complex64>,
}

impl GridDump {
    pub fn from_field(g: &GridField) -> Self {
        GridDump { half_width: g.half_width(), n: g.n(), support_radius: g.support_radius(), values: g.values().to_vec() }
    }

    pub fn from_map(f: &PlanarQCMap) -> Self {
        let (half_width, n, support_radius) = f.geometry();
        GridDump { half_width, n, support_radius, values: f.values().to_vec() }
    }

    pub fn point(&self, i: usize) -> Complex64 {
        let h = 2.0 * self.half_width / self.n as f64;
        let at = |k: usize| -self.half_width + (k as f64 + 0.5) * h;
        Complex64::new(at(i % self.n), at(i / self.n))
    }

    /// Little-endian `R: f64`, `N: u64`, `support_radius: f64`, then `N²`
    /// `(re, im)` pairs of `f64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(24 + 16 * self.values.len());
        buf.extend_from_slice(&self.half_width.to_le_bytes());
        buf.extend_from_slice(&(self.n as u64).to_le_bytes());
        buf.extend_from_slice(&self.support_radius.to_le_bytes());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        buf
    }

    #[cfg(test)]
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CliError> {
        let word = |i: usize| -> Result<[u8; 8], CliError> {
            bytes.get(i..i + 8).and_then(|s| s.try_into().ok()).ok_or_else(|| CliError::input("truncated grid dump"))
        };
        let half_width = f64::from_le_bytes(word(0)?);
        let n = u64::from_le_bytes(word(8)?) as usize;
        let support_radius = f64::from_le_bytes(word(16)?);
        if n.checked_mul(n).and_then(|m| m.checked_mul(16)).map(|m| m + 24) != Some(bytes.len()) {
            return Err(CliError::input("grid dump length does not match its header"));
        }
        let values = (0..n * n)
            .map(|k| Ok(Complex64::new(f64::from_le_bytes(word(24 + 16 * k)?), f64::from_le_bytes(word(32 + 16 * k)?))))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(GridDump { half_width, n, support_radius, values })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// `x,y,re,im` rows at every cell center.
    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let rows = self.values.iter().enumerate().map(|(i, v)| {
            let z = self.point(i);
            [z.re, z.im, v.re, v.im]
        });
        write_csv(path, &["x", "y", "re", "im"], rows)
    }
}

pub fn write_csv<I, const K: usize>(path: &Path, header: &[&str; K], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = [f64; K]>,
{
    let io = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv_to(std::io::BufWriter::new(file), header, rows).map_err(io)
}

pub fn write_csv_to<W, I, const K: usize>(mut w: W, header: &[&str; K], rows: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = [f64; K]>,
{
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_json_round_trips_canonically() {
        let text = r#"{"reality":false,"terms":[{"num":1,"den":3,"re":2.0,"im":0.0},{"num":2,"den":4,"re":1.0,"im":0.5}]}"#;
        let s = parse_series_json(text).unwrap();
        let once = serde_json::to_string(&SeriesJson::from_series(&s)).unwrap();
        let twice = serde_json::to_string(&SeriesJson::from_series(&parse_series_json(&once).unwrap())).unwrap();
        assert_eq!(once, twice);
        assert!(once.contains(r#"{"num":1,"den":2,"re":1.0,"im":0.5}"#));
    }

    #[test]
    fn chain_grammar() {
        assert_eq!(parse_chain("p=3", 3).unwrap().levels(), &[1, 3, 9]);
        assert_eq!(parse_chain("factorial", 4).unwrap().levels(), &[1, 2, 6, 24]);
        assert_eq!(parse_chain("custom:2,4,12", 9).unwrap().levels(), &[2, 4, 12]);
        assert!(parse_chain("custom:2,3", 2).is_err());
        assert!(parse_chain("q=2", 2).is_err());
        let c = parse_chain("p=2", 3).unwrap();
        assert_eq!(ChainJson::from_chain(&c).to_chain().unwrap(), c);
    }

    #[test]
    fn mu_fixtures() {
        assert!(matches!(parse_mu("constant:3").unwrap(), MuInput::Series(_)));
        assert!(matches!(parse_mu("counterexample:N=6").unwrap(), MuInput::Counterexample(c) if c.terms() == 6));
        assert!(matches!(parse_mu("disk:0.3").unwrap(), MuInput::Disk(k) if k == 0.3));
        assert!(parse_mu("constant:x").is_err());
        assert!(parse_mu("/no/such/file.json").is_err());
    }

    #[test]
    fn profiles() {
        assert_eq!(parse_profile("bump:-0.5,0.5").unwrap(), Profile::Bump { lo: -0.5, hi: 0.5 });
        assert!(parse_profile("bump:1,0").is_err());
        assert!(parse_profile("gaussian:0").is_err());
    }

    #[test]
    fn grid_dump_round_trips() {
        let g = GridField::from_fn(2.0, 8, 1.5, |z| z * z).unwrap();
        let d = GridDump::from_field(&g);
        assert_eq!(d.to_bytes().len(), 24 + 16 * 64);
        assert_eq!(GridDump::from_bytes(&d.to_bytes()).unwrap(), d);
        assert!(GridDump::from_bytes(&d.to_bytes()[..100]).is_err());
        for i in [0, 9, 63] {
            assert_eq!(d.point(i), g.point(i));
        }
    }
}

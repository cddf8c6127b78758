//! One function per subcommand. Each returns the report and its status.

use std::path::Path;

use qdouble::algebra::{GradedPoly, Parity, Role};
use qdouble::algebroid::AlgebroidData;
use qdouble::doubles::neighbors::{enumerate_neighbors, EdgeKind, Manifestation};
use qdouble::doubles::{
    carry, check_commutativity, check_condition_i, check_condition_ii, check_condition_iii, dualize, DoubleCharts,
    FourFields, StructurePair,
};
use qdouble::drinfeld::{build_cotangent_double, schouten_derivation_verdict, BialgebroidInstance};
use qdouble::dsl::{self, unreversed, NamedField, StructureFile};
use qdouble::fields::homological_verdict;
use qdouble::multifold::{check_nfold_antialgebroid, reverse_field, MultiChart, MultiStructure};
use qdouble::report::Report;
use qdouble::{check_weight, Derivation};

use crate::Command;

pub enum Status {
    Pass,
    Fail,
    Disagree,
}

pub struct Outcome {
    pub report: Report,
    pub status: Status,
}

/// An input error: unreadable file, bad syntax, or a binding that does not fit.
pub struct Failure(pub String);

impl From<qdouble::Error> for Failure {
    fn from(e: qdouble::Error) -> Self {
        Failure(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn run(cmd: &Command, warn_reorder: bool) -> Result<Outcome> {
    match cmd {
        Command::ParseCheck { file } => parse_check(&load(file, warn_reorder)?),
        Command::CheckQ2 { file, fields } => check_q2(&load(file, warn_reorder)?, fields),
        Command::DeriveBrackets { file, field } => derive_brackets(&load(file, warn_reorder)?, field.as_deref()),
        Command::ReverseParity { file, direction, fields } => {
            let f = load(file, warn_reorder)?;
            let r = direction_of(&f, "reverse-parity", *direction)?;
            transform(f, "reverse-parity", fields, true, |x, mc| Ok(reverse_field(x, mc, r)?))
        }
        Command::Dualize { file, direction, fields } => {
            let f = load(file, warn_reorder)?;
            let r = direction_of(&f, "dualize", *direction)?;
            transform(f, "dualize", fields, false, |x, mc| Ok(dualize(x, mc, r)?))
        }
        Command::CheckDouble { file, q1, q2, all } => {
            check_double(&load(file, warn_reorder)?, q1.as_deref(), q2.as_deref(), *all)
        }
        Command::CheckNfold { file, fields } => check_nfold(&load(file, warn_reorder)?, fields),
        Command::BuildDouble { file, e, e_star } => {
            build_double(&load(file, warn_reorder)?, e.as_deref(), e_star.as_deref())
        }
        Command::Neighbors { n } => neighbors(*n),
    }
}

/// A parsed file together with the report it starts.
struct Loaded {
    file: StructureFile,
    warnings: Vec<String>,
}

fn load(path: &Path, warn_reorder: bool) -> Result<Loaded> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let (file, warnings) =
        dsl::parse_with_warnings(&src).map_err(|e| Failure(format!("{}:{e}", path.display())))?;
    let warnings = if warn_reorder { warnings.iter().map(|w| format!("{}: {}", w.pos, w.message)).collect() } else { Vec::new() };
    Ok(Loaded { file, warnings })
}

impl Loaded {
    fn report(&self, command: &str) -> Report {
        let mut r = Report::new(command);
        r.warnings = self.warnings.clone();
        r
    }

    /// Command-line value, else the binding of the task named after the command.
    fn binding(&self, task: &str, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string).or_else(|| self.file.task(task).and_then(|t| t.get(key)).map(str::to_string))
    }

    fn field(&self, name: &str) -> Result<&Derivation> {
        Ok(self.file.field(name)?)
    }

    /// `names[k]` if bound, else the field called `fallback[k]`, else the k-th field.
    fn pick(&self, names: &[Option<String>], fallback: &[&str]) -> Result<Vec<String>> {
        names
            .iter()
            .zip(fallback)
            .enumerate()
            .map(|(k, (name, fb))| {
                name.clone()
                    .or_else(|| self.file.fields.iter().find(|f| f.name == *fb).map(|f| f.name.clone()))
                    .or_else(|| self.file.fields.get(k).map(|f| f.name.clone()))
                    .ok_or_else(|| Failure(format!("no field bound to `{fb}`")))
            })
            .collect()
    }
}

fn status(r: &Report) -> Status {
    if r.passed() {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn role_text(role: Role) -> String {
    match role {
        Role::Base => "base".into(),
        Role::Param => "param".into(),
        Role::Block(s) => {
            let dirs: Vec<String> = s.dirs().iter().map(usize::to_string).collect();
            format!("block {}", dirs.join(" "))
        }
    }
}

fn parse_check(l: &Loaded) -> Result<Outcome> {
    let mut r = l.report("parse-check");
    let f = &l.file;
    let c = f.chart.chart();
    let mut rows: Vec<(String, String)> =
        c.gens().iter().map(|g| (g.name.clone(), format!("{} {}", g.parity, role_text(g.role)))).collect();
    if !f.chart.reversals().is_empty() {
        let dirs: Vec<String> = f.chart.reversals().iter().map(usize::to_string).collect();
        rows.push(("reversed".into(), dirs.join(" ")));
    }
    r.table("chart", rows);
    let fields = f
        .fields
        .iter()
        .map(|nf| {
            let parity = nf.field.parity().map_or("mixed".into(), |p| p.to_string());
            let weight = nf.field.weight().map_or("mixed".into(), |w| format!("{w:?}"));
            (nf.name.clone(), format!("{parity}, weight {weight}"))
        })
        .collect();
    r.table("fields", fields);
    if let Some(t) = &f.transition {
        r.check("transition", &t.validate()?);
    }
    Ok(Outcome { status: status(&r), report: r })
}

fn check_q2(l: &Loaded, names: &[String]) -> Result<Outcome> {
    let mut r = l.report("check-q2");
    let names: Vec<String> = if names.is_empty() {
        match l.binding("check-q2", "field", None) {
            Some(list) => list.split(',').map(str::to_string).collect(),
            None => l.file.fields.iter().map(|f| f.name.clone()).collect(),
        }
    } else {
        names.to_vec()
    };
    if names.is_empty() {
        return Err(Failure("the file has no fields".into()));
    }
    for name in names {
        let v = homological_verdict(l.field(&name)?);
        r.check(name, &v);
    }
    Ok(Outcome { status: status(&r), report: r })
}

fn frame_combination(coeffs: &[GradedPoly]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format!("({c})*e{}", k + 1))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn derive_brackets(l: &Loaded, flag: Option<&str>) -> Result<Outcome> {
    let mut r = l.report("derive-brackets");
    let name = l.pick(&[l.binding("derive-brackets", "field", flag)], &["Q"])?.remove(0);
    let q = l.field(&name)?;
    if q.chart().directions() != 1 {
        return Err(Failure("derive-brackets needs a chart with one direction".into()));
    }
    let data = AlgebroidData::from_odd_chart(q)?;
    let c = data.chart();
    let mut anchor = Vec::new();
    for i in 0..data.rank() {
        for (a, &g) in data.base().iter().enumerate() {
            let v = data.anchor_coeff(i, a);
            if !v.is_zero() {
                anchor.push((format!("rho(e{})({})", i + 1, c.name(g)), v.to_string()));
            }
        }
    }
    let mut brackets = Vec::new();
    for i in 0..data.rank() {
        for j in i..data.rank() {
            let b = data.frame_bracket(i, j)?;
            if b.iter().any(|p| !p.is_zero()) {
                brackets.push((format!("[e{},e{}]", i + 1, j + 1), frame_combination(&b)));
            }
        }
    }
    r.table("anchor", anchor);
    r.table("bracket", brackets);
    let homological = r.check(format!("{name} squares to zero"), &homological_verdict(q));
    let jacobi = r.check("Jacobi identity of the linear Poisson bracket", &data.lie_poisson(None)?.jacobi_verdict()?);
    let status = if homological != jacobi { Status::Disagree } else { status(&r) };
    Ok(Outcome { report: r, status })
}

fn direction_of(l: &Loaded, task: &str, flag: Option<usize>) -> Result<usize> {
    let raw = l.binding(task, "direction", flag.map(|r| r.to_string()).as_deref());
    let raw = raw.ok_or_else(|| Failure(format!("{task} needs --direction")))?;
    raw.parse().map_err(|_| Failure(format!("invalid direction `{raw}`")))
}

/// Apply a chart-changing operation to every field (or to the chart alone).
fn transform(
    l: Loaded,
    command: &str,
    names: &[String],
    keep_transition: bool,
    op: impl Fn(&Derivation, &MultiChart) -> Result<(MultiChart, Derivation)>,
) -> Result<Outcome> {
    let mut r = l.report(command);
    let f = &l.file;
    let probe = Derivation::zero(f.chart.chart(), Parity::Odd);
    let (chart, _) = op(&probe, &f.chart)?;
    let mut fields = Vec::new();
    for name in names {
        l.field(name)?;
    }
    for nf in f.fields.iter().filter(|nf| names.is_empty() || names.contains(&nf.name)) {
        let (mc, y) = op(&nf.field, &f.chart).map_err(|e| Failure(format!("field {}: {}", nf.name, e.0)))?;
        if mc != chart {
            return Err(Failure(format!("field {} lands on a different chart", nf.name)));
        }
        fields.push(NamedField { name: nf.name.clone(), field: y });
    }
    let out = StructureFile {
        chart,
        transition: if keep_transition { f.transition.clone() } else { None },
        fields,
        tasks: f.tasks.clone(),
    };
    r.document = Some(dsl::print(&out));
    Ok(Outcome { report: r, status: Status::Pass })
}

fn check_double(l: &Loaded, q1: Option<&str>, q2: Option<&str>, all: bool) -> Result<Outcome> {
    let mut r = l.report(if all { "check-double --all" } else { "check-double" });
    let names = l.pick(
        &[l.binding("check-double", "q1", q1), l.binding("check-double", "q2", q2)],
        &["Q1", "Q2"],
    )?;
    let f = &l.file;
    if f.chart.directions() != 2 {
        return Err(Failure("check-double needs a chart with two directions".into()));
    }
    let charts = DoubleCharts::new(&unreversed(&f.chart))?;
    let bring = |name: &str| -> Result<Derivation> {
        let x = l.field(name)?;
        match f.chart.reversals() {
            [2, 1] => Ok(x.clone()),
            [1, 2] => Ok(carry(x, &f.chart, &charts.pi2)?),
            _ => Err(Failure("the pair must live on the chart with both directions reversed".into())),
        }
    };
    let pair = StructurePair::new(&charts, bring(&names[0])?, bring(&names[1])?)?;
    let comm = r.check("commutativity", &check_commutativity(&pair)?);
    let mut agree = true;
    if all {
        match FourFields::from_pair(&pair) {
            Ok(four) => {
                let i = r.check("condition I", &check_condition_i(&four)?);
                let ii = r.check("condition II", &check_condition_ii(&four)?);
                let iii = r.check("condition III", &check_condition_iii(&four)?);
                agree = comm == (i && ii && iii) && (ii || !iii);
            }
            Err(e) => {
                r.warnings.push(format!("conditions I-III not evaluated: {e}"));
                agree = !comm;
            }
        }
    }
    let status = if agree { status(&r) } else { Status::Disagree };
    Ok(Outcome { report: r, status })
}

fn check_nfold(l: &Loaded, flag: &[String]) -> Result<Outcome> {
    let mut r = l.report("check-nfold");
    let f = &l.file;
    let names: Vec<String> = if !flag.is_empty() {
        flag.to_vec()
    } else if let Some(list) = l.binding("check-nfold", "fields", None) {
        list.split(',').map(str::to_string).collect()
    } else {
        f.fields.iter().map(|nf| nf.name.clone()).collect()
    };
    let n = f.chart.directions();
    if names.len() != n {
        return Err(Failure(format!("expected {n} fields, one per direction, got {}", names.len())));
    }
    let fields: Vec<Derivation> = names.iter().map(|name| l.field(name).cloned()).collect::<Result<_>>()?;
    let mut weights_ok = true;
    for (k, (name, x)) in names.iter().zip(&fields).enumerate() {
        let expected: Vec<i32> = (0..n).map(|d| i32::from(d == k)).collect();
        weights_ok &= r.check(format!("{name} weight"), &check_weight(x, &expected));
    }
    if weights_ok {
        let m = MultiStructure::new(&f.chart, fields)?;
        r.check("commutators", &check_nfold_antialgebroid(&m)?);
    }
    Ok(Outcome { status: status(&r), report: r })
}

fn build_double(l: &Loaded, e: Option<&str>, e_star: Option<&str>) -> Result<Outcome> {
    let mut r = l.report("build-double");
    let names = l.pick(
        &[l.binding("build-double", "e", e), l.binding("build-double", "e_star", e_star)],
        &["QE", "QEs"],
    )?;
    let b = BialgebroidInstance::from_fibre_product(l.field(&names[0])?, l.field(&names[1])?)?;
    let (pair, v) = build_cotangent_double(&b)?;
    let built = r.check("cotangent double", &v);
    let schouten = r.check("Q_E* is a derivation of the Schouten bracket", &schouten_derivation_verdict(&b)?);
    r.document = Some(dsl::print(&StructureFile::from_pair(&pair)));
    let status = if built != schouten { Status::Disagree } else { status(&r) };
    Ok(Outcome { report: r, status })
}

fn manifestation(m: Manifestation) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn neighbors(n: usize) -> Result<Outcome> {
    let mut r = Report::new("neighbors");
    let g = enumerate_neighbors(n)?;
    let nodes = g
        .nodes
        .iter()
        .map(|v| {
            let structures: Vec<String> = v.structures.iter().map(|(s, m)| format!("{s}: {}", manifestation(*m))).collect();
            let text = format!(
                "core {}, reversed {:?}, valence {}, structures [{}]",
                v.core,
                v.reversed,
                g.valence(v.id),
                structures.join(", ")
            );
            (v.name.clone(), text)
        })
        .collect();
    let edges = g
        .edges
        .iter()
        .map(|e| {
            let kind = match e.kind {
                EdgeKind::Reverse(s) => format!("reverse {s}"),
                EdgeKind::Dual(s) => format!("dual {s}"),
            };
            (format!("{} -- {}", g.nodes[e.from].name, g.nodes[e.to].name), kind)
        })
        .collect();
    r.table("nodes", nodes);
    r.table("edges", edges);
    r.data = Some(serde_json::to_value(&g).map_err(|e| Failure(e.to_string()))?);
    Ok(Outcome { report: r, status: Status::Pass })
}

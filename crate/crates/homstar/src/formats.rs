//! Canonical text formats for presentations, forms, constraints, star products and
//! equivalence witnesses.
//!
//! Every `render_*` output is byte-stable and `parse_*(render_*(x)) == x`. Indices in files
//! are 1-based. Lines are `key = value`; `#` starts a comment.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::algebroid::{AForm, AlgebroidPresentation, ConnectionData};
use crate::cochain::{parse_term_line, Cochain};
use crate::error::{Error, Result};
use crate::poly::{Poly, VarSpec};
use crate::reduction::ConstraintData;
use crate::star::{EquivalenceSeries, StarSeries};
use crate::text::parse_poly;

/// Tag written into star and witness files: `C₁ = (i/2){·,·}` with `μ₀` the pointwise
/// product and `h`-power `r` carried by `C_r`.
pub const CONVENTION: &str = "kks-half-i";
pub const STAR_FORMAT: &str = "homstar-star/1";
pub const WITNESS_FORMAT: &str = "homstar-witness/1";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// A `key = value` line with the key split into its name and bracketed indices.
struct Entry<'a> {
    line: usize,
    name: &'a str,
    idx: Vec<usize>,
    value: &'a str,
}

fn split_key(line: usize, key: &str) -> Result<(&str, Vec<usize>)> {
    let key = key.trim();
    let Some(open) = key.find('[') else {
        return Ok((key, vec![]));
    };
    let name = &key[..open];
    let mut idx = Vec::new();
    let mut rest = &key[open..];
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.split_once(']'))
            .ok_or_else(|| perr(line, format!("malformed key `{key}`")))?;
        let n: usize = inner.0.trim().parse().map_err(|_| perr(line, format!("bad index in `{key}`")))?;
        if n == 0 {
            return Err(perr(line, format!("indices are 1-based in `{key}`")));
        }
        idx.push(n - 1);
        rest = inner.1;
    }
    Ok((name, idx))
}

fn entries(src: &str) -> Result<Vec<Entry<'_>>> {
    let mut out = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (k, v) = text.split_once('=').ok_or_else(|| perr(line, format!("expected `key = value`, got `{text}`")))?;
        let (name, idx) = split_key(line, k)?;
        out.push(Entry { line, name, idx, value: v.trim() });
    }
    Ok(out)
}

fn scalar_field(es: &[Entry<'_>], name: &str) -> Result<Option<usize>> {
    let mut found = None;
    for e in es.iter().filter(|e| e.name == name) {
        if found.is_some() {
            return Err(perr(e.line, format!("duplicate `{name}`")));
        }
        let v = e.value.parse().map_err(|_| perr(e.line, format!("`{name}` must be a non-negative integer")))?;
        found = Some(v);
    }
    Ok(found)
}

fn poly_at(spec: VarSpec, e: &Entry<'_>) -> Result<Poly> {
    parse_poly(spec, e.value).map_err(|err| match err {
        Error::Parse { msg, .. } => perr(e.line, msg),
        other => other,
    })
}

fn check_range(e: &Entry<'_>, bounds: &[usize]) -> Result<()> {
    if e.idx.len() != bounds.len() || e.idx.iter().zip(bounds).any(|(i, b)| i >= b) {
        return Err(perr(e.line, format!("`{}` index out of range or wrong arity", e.name)));
    }
    Ok(())
}

/// Canonical text of a presentation. Only nonzero entries are written; `c` only for `i < j`.
pub fn render_presentation(a: &AlgebroidPresentation) -> String {
    let (n, m) = (a.base(), a.rank());
    let mut s = String::new();
    s.push_str(&format!("dim_base = {n}\nrank = {m}\nbasis_names = {}\n", a.names().join(" ")));
    for i in 0..m {
        for x in 0..n {
            let p = a.anchor(i, x);
            if !p.is_zero() {
                s.push_str(&format!("anchor[{}][{}] = {p}\n", i + 1, x + 1));
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                let p = a.c(i, j, k);
                if !p.is_zero() {
                    s.push_str(&format!("c[{}][{}][{}] = {p}\n", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    if let Some(conn) = a.connection() {
        s.push_str("connection = yes\n");
        for (i, row) in conn.gamma.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, p) in col.iter().enumerate() {
                    if !p.is_zero() {
                        s.push_str(&format!("connection[{}][{}][{}] = {p}\n", i + 1, j + 1, k + 1));
                    }
                }
            }
        }
    }
    s
}

/// Parses a presentation. `c[j][i][k]` is implied by `c[i][j][k]`; giving both is allowed
/// only if they are consistent.
pub fn parse_presentation(src: &str) -> Result<AlgebroidPresentation> {
    let es = entries(src)?;
    let n = scalar_field(&es, "dim_base")?.ok_or_else(|| perr(0, "missing `dim_base`"))?;
    let m = scalar_field(&es, "rank")?.ok_or_else(|| perr(0, "missing `rank`"))?;
    let spec = VarSpec::new(n, m);
    let mut anchor = vec![vec![Poly::zero(spec); n]; m];
    let mut c: BTreeMap<(usize, usize, usize), (usize, Poly)> = BTreeMap::new();
    let mut gamma: Option<ConnectionData> = None;
    let mut names = None;
    let mut seen = BTreeMap::new();
    for e in &es {
        if !e.idx.is_empty() {
            if let Some(prev) = seen.insert((e.name, e.idx.clone()), e.line) {
                return Err(perr(e.line, format!("duplicate entry (first on line {prev})")));
            }
        }
        match e.name {
            "dim_base" | "rank" => {}
            "basis_names" => {
                let v: Vec<String> = e.value.split_whitespace().map(str::to_string).collect();
                names = Some(v);
            }
            "anchor" => {
                check_range(e, &[m, n])?;
                anchor[e.idx[0]][e.idx[1]] = poly_at(spec, e)?;
            }
            "c" => {
                check_range(e, &[m, m, m])?;
                let (i, j, k) = (e.idx[0], e.idx[1], e.idx[2]);
                let p = poly_at(spec, e)?;
                if i == j {
                    if !p.is_zero() {
                        return Err(perr(e.line, "c[i][i][k] must vanish"));
                    }
                    continue;
                }
                let (key, val) = if i < j { ((i, j, k), p) } else { ((j, i, k), -&p) };
                if let Some((line, prev)) = c.get(&key) {
                    if *prev != val {
                        return Err(perr(e.line, format!("inconsistent with the entry on line {line}")));
                    }
                }
                c.insert(key, (e.line, val));
            }
            "connection" if e.idx.is_empty() => {
                if e.value != "yes" {
                    return Err(perr(e.line, "`connection` must be `yes`"));
                }
                gamma.get_or_insert_with(|| ConnectionData::zero(spec));
            }
            "connection" => {
                check_range(e, &[m, m, m])?;
                let p = poly_at(spec, e)?;
                gamma.get_or_insert_with(|| ConnectionData::zero(spec)).gamma[e.idx[0]][e.idx[1]][e.idx[2]] = p;
            }
            other => return Err(perr(e.line, format!("unknown key `{other}`"))),
        }
    }
    let mut structure = vec![vec![vec![Poly::zero(spec); m]; m]; m];
    for ((i, j, k), (_, p)) in c {
        structure[j][i][k] = -&p;
        structure[i][j][k] = p;
    }
    let names = match names {
        Some(v) if v.is_empty() && m == 0 => None,
        other => other,
    };
    let a = AlgebroidPresentation::new(n, m, anchor, structure, names)?;
    match gamma {
        Some(g) => a.with_connection(g),
        None => Ok(a),
    }
}

/// Lowercase hex SHA-256 of the canonical presentation text.
pub fn presentation_hash(a: &AlgebroidPresentation) -> String {
    hex::encode(Sha256::digest(render_presentation(a).as_bytes()))
}

pub fn render_form(f: &AForm) -> String {
    let mut s = format!("degree = {}\n", f.degree());
    for (idx, p) in f.components() {
        if p.is_zero() {
            continue;
        }
        let key: String = idx.iter().map(|i| format!("[{}]", i + 1)).collect();
        s.push_str(&format!("form{key} = {p}\n"));
    }
    s
}

/// Parses a form on the given ambient. Components may be listed in any index order; the
/// sign of the permutation is applied.
pub fn parse_form(spec: VarSpec, src: &str) -> Result<AForm> {
    let es = entries(src)?;
    let p = scalar_field(&es, "degree")?.ok_or_else(|| perr(0, "missing `degree`"))?;
    let mut out = AForm::zero(spec, p);
    for e in &es {
        match e.name {
            "degree" => {}
            "form" => {
                check_range(e, &vec![spec.fibre; p])?;
                out.add_component(&e.idx, &poly_at(spec, e)?);
            }
            other => return Err(perr(e.line, format!("unknown key `{other}`"))),
        }
    }
    Ok(out)
}

fn render_list(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn render_constraint(d: &ConstraintData) -> String {
    format!(
        "x_out = {}\nx_quot = {}\nfibre_k = {}\nfibre_n = {}\nfibre_c = {}\n",
        render_list(&d.x_out),
        render_list(&d.x_quot),
        render_list(&d.fibre_k),
        render_list(&d.fibre_n),
        render_list(&d.fibre_c)
    )
}

/// Parses a constraint file; missing lists are empty. Lists are separated by spaces or
/// commas.
pub fn parse_constraint(src: &str) -> Result<ConstraintData> {
    let mut d = ConstraintData::default();
    for e in entries(src)? {
        let target = match e.name {
            "x_out" => &mut d.x_out,
            "x_quot" => &mut d.x_quot,
            "fibre_k" => &mut d.fibre_k,
            "fibre_n" => &mut d.fibre_n,
            "fibre_c" => &mut d.fibre_c,
            other => return Err(perr(e.line, format!("unknown key `{other}`"))),
        };
        if !e.idx.is_empty() {
            return Err(perr(e.line, "constraint keys take no indices"));
        }
        for tok in e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let n: usize = tok.parse().map_err(|_| perr(e.line, format!("bad index `{tok}`")))?;
            if n == 0 {
                return Err(perr(e.line, "indices are 1-based"));
            }
            target.push(n - 1);
        }
    }
    Ok(d)
}

fn render_blocks(s: &mut String, name: &str, cochains: &[Cochain]) {
    for (r, c) in cochains.iter().enumerate() {
        s.push_str(&format!("begin {name}{}\n", r + 1));
        for l in c.render_lines() {
            s.push_str(&l);
            s.push('\n');
        }
        s.push_str(&format!("end {name}{}\n", r + 1));
    }
}

fn render_with_header(format: &str, a: &AlgebroidPresentation, tag: &str, cochains: &[Cochain]) -> String {
    let mut s = String::new();
    s.push_str(&format!("format = {format}\n"));
    s.push_str(&format!("convention = {CONVENTION}\n"));
    s.push_str(&format!("order = {}\n", cochains.len()));
    s.push_str(&format!("presentation_sha256 = {}\n", presentation_hash(a)));
    s.push_str("begin presentation\n");
    s.push_str(&render_presentation(a));
    s.push_str("end presentation\n");
    render_blocks(&mut s, tag, cochains);
    s
}

/// Canonical star file: header, embedded presentation, then `C1..CK` blocks of
/// `[d_0, d_1] -> coeff` lines.
pub fn render_star(star: &StarSeries) -> String {
    render_with_header(STAR_FORMAT, star.presentation(), "C", star.cochains())
}

pub fn render_witness(a: &AlgebroidPresentation, w: &EquivalenceSeries) -> String {
    render_with_header(WITNESS_FORMAT, a, "S", w.ops())
}

/// Splits a star or witness file into header entries, the presentation and cochain blocks.
fn parse_framed(src: &str, format: &str, tag: &str, arity: usize) -> Result<(AlgebroidPresentation, Vec<Cochain>)> {
    let lines: Vec<&str> = src.lines().collect();
    let mut header = String::new();
    let mut pos = 0;
    while pos < lines.len() && lines[pos].trim() != "begin presentation" {
        header.push_str(lines[pos]);
        header.push('\n');
        pos += 1;
    }
    let hs = entries(&header)?;
    let get = |key: &str| -> Result<&str> {
        hs.iter().find(|e| e.name == key).map(|e| e.value).ok_or_else(|| perr(0, format!("missing header `{key}`")))
    };
    if get("format")? != format {
        return Err(perr(0, format!("expected format `{format}`")));
    }
    if get("convention")? != CONVENTION {
        return Err(perr(0, format!("unsupported convention `{}`", get("convention")?)));
    }
    let order: usize = get("order")?.parse().map_err(|_| perr(0, "bad `order`"))?;
    let hash = get("presentation_sha256")?.to_string();
    if pos == lines.len() {
        return Err(perr(0, "missing presentation block"));
    }
    pos += 1;
    let mut body = String::new();
    while pos < lines.len() && lines[pos].trim() != "end presentation" {
        body.push_str(lines[pos]);
        body.push('\n');
        pos += 1;
    }
    if pos == lines.len() {
        return Err(perr(0, "unterminated presentation block"));
    }
    pos += 1;
    let a = parse_presentation(&body)?;
    if presentation_hash(&a) != hash {
        return Err(Error::Invalid("presentation hash does not match the embedded presentation".into()));
    }
    let spec = a.spec();
    let mut cochains = Vec::with_capacity(order);
    for r in 1..=order {
        let open = format!("begin {tag}{r}");
        let close = format!("end {tag}{r}");
        match lines.get(pos) {
            Some(l) if l.trim() == open => pos += 1,
            _ => return Err(perr(pos + 1, format!("expected `{open}`"))),
        }
        let mut c = Cochain::zero(spec, arity);
        loop {
            let Some(l) = lines.get(pos) else {
                return Err(perr(pos, format!("missing `{close}`")));
            };
            pos += 1;
            if l.trim() == close {
                break;
            }
            let (d, p) = parse_term_line(spec, l).map_err(|e| match e {
                Error::Parse { msg, .. } => perr(pos, msg),
                other => other,
            })?;
            if d.len() != arity {
                return Err(perr(pos, format!("expected {arity} derivative slots")));
            }
            c.add_term(d, &p);
        }
        cochains.push(c);
    }
    if let Some(extra) = lines[pos..].iter().position(|l| !l.trim().is_empty()) {
        return Err(perr(pos + extra + 1, "trailing content"));
    }
    Ok((a, cochains))
}

pub fn parse_star(src: &str) -> Result<StarSeries> {
    let (a, cs) = parse_framed(src, STAR_FORMAT, "C", 2)?;
    StarSeries::new(a, cs)
}

pub fn parse_witness(src: &str) -> Result<(AlgebroidPresentation, EquivalenceSeries)> {
    let (a, cs) = parse_framed(src, WITNESS_FORMAT, "S", 1)?;
    let w = EquivalenceSeries::from_ops(a.spec(), cs)?;
    Ok((a, w))
}

/// Loads a star and re-checks the Maurer–Cartan equation and homogeneity at every order.
pub fn parse_star_verified(src: &str) -> Result<StarSeries> {
    let star = parse_star(src)?;
    if let Some(r) = star.first_defect()? {
        return Err(Error::Invalid(format!("star is not associative at order {r}")));
    }
    if let Some(r) = star.first_inhomogeneous() {
        return Err(Error::Invalid(format!("star is inhomogeneous at order {r}")));
    }
    Ok(star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::star::build_star;

    #[test]
    fn presentations_round_trip() {
        for name in ["h3", "so3", "aff1", "abelian2", "tangent2", "action-line"] {
            let a = AlgebroidPresentation::preset(name).unwrap();
            let text = render_presentation(&a);
            let back = parse_presentation(&text).unwrap();
            assert_eq!(back, a, "{name}");
            assert_eq!(render_presentation(&back), text);
        }
    }

    #[test]
    fn implied_antisymmetry_and_conflicts() {
        let a = parse_presentation("dim_base = 0\nrank = 3\nc[2][1][3] = -1\n").unwrap();
        assert_eq!(a, AlgebroidPresentation::heisenberg());
        let bad = parse_presentation("dim_base = 0\nrank = 3\nc[1][2][3] = 1\nc[2][1][3] = 1\n");
        assert!(matches!(bad, Err(Error::Parse { line: 4, .. })));
        assert!(parse_presentation("dim_base = 0\nrank = 2\nc[1][3][1] = 1\n").is_err());
    }

    #[test]
    fn stars_and_forms_round_trip() {
        let h = AlgebroidPresentation::heisenberg();
        let b = AForm::basis(h.spec(), &[0, 1], Scalar::ratio(-3, 2));
        assert_eq!(parse_form(h.spec(), &render_form(&b)).unwrap(), b);
        let star = build_star(&h, Some(&b), 3).unwrap();
        let text = render_star(&star);
        let back = parse_star_verified(&text).unwrap();
        assert_eq!(back, star);
        assert_eq!(render_star(&back), text);
    }

    #[test]
    fn tampered_files_are_rejected() {
        let star = build_star(&AlgebroidPresentation::so3(), None, 2).unwrap();
        let text = render_star(&star).replace("c[1][2][3] = 1", "c[1][2][3] = 2");
        assert!(matches!(parse_star(&text), Err(Error::Invalid(_))));
    }

    #[test]
    fn constraints_round_trip() {
        let d = parse_constraint("x_out = 1, 2\nfibre_k = 3\n# comment\nfibre_n = 1 2\n").unwrap();
        assert_eq!(d.x_out, vec![0, 1]);
        assert_eq!(parse_constraint(&render_constraint(&d)).unwrap(), d);
    }
}

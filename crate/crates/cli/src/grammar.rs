//! Variety specs of the form `constructor[:params][,key=value...]`.
//!
//! Positional parameters come first; a `key=value` token opens a keyword
//! whose value continues over the following tokens without `=`, so
//! `tetragonal:2,2,1,b=1,2` reads `e = [2,2,1]`, `b = [1,2]`.

use std::collections::BTreeMap;

use conormal_core::varieties::{pentagonal_defaults, Constructor, Realization, VarietySpec};

use crate::CliError;

struct Parsed {
    name: String,
    positional: Vec<String>,
    keys: BTreeMap<String, Vec<String>>,
}

fn split(text: &str) -> Result<Parsed, CliError> {
    let text = text.trim();
    let (name, rest) = match text.find([':', ',']) {
        Some(i) => (&text[..i], &text[i + 1..]),
        None => (text, ""),
    };
    let name = name.trim();
    if name.is_empty() {
        return Err(CliError::Spec("empty constructor name".into()));
    }
    let mut positional = Vec::new();
    let mut keys: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = tok.split_once('=') {
            let k = k.trim().to_string();
            if keys.contains_key(&k) {
                return Err(CliError::Spec(format!("key `{k}` given twice")));
            }
            keys.insert(k.clone(), vec![v.trim().to_string()]);
            current = Some(k);
        } else if let Some(k) = &current {
            keys.get_mut(k).expect("key was inserted").push(tok.to_string());
        } else {
            positional.push(tok.to_string());
        }
    }
    Ok(Parsed { name: name.to_string(), positional, keys })
}

fn numbers<T: std::str::FromStr>(what: &str, toks: &[String]) -> Result<Vec<T>, CliError> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| CliError::Spec(format!("{what}: `{t}` is not a non-negative integer"))))
        .collect()
}

fn fixed<const N: usize>(what: &str, toks: &[String]) -> Result<[u32; N], CliError> {
    let v: Vec<u32> = numbers(what, toks)?;
    v.try_into().map_err(|v: Vec<u32>| CliError::Spec(format!("{what} needs {N} values, got {}", v.len())))
}

impl Parsed {
    fn allow(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.keys.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Spec(format!("unknown key `{k}` for {}", self.name))),
            None => Ok(()),
        }
    }

    fn no_positional(&self) -> Result<(), CliError> {
        if self.positional.is_empty() {
            Ok(())
        } else {
            Err(CliError::Spec(format!("{} takes no positional parameters", self.name)))
        }
    }

    fn pair(&self) -> Result<(usize, usize), CliError> {
        let v: Vec<usize> = numbers(&self.name, &self.positional)?;
        match v.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(CliError::Spec(format!("{} needs two parameters", self.name))),
        }
    }

    fn single(&self) -> Result<u32, CliError> {
        let v: Vec<u32> = numbers(&self.name, &self.positional)?;
        match v.as_slice() {
            [d] => Ok(*d),
            _ => Err(CliError::Spec(format!("{} needs one parameter", self.name))),
        }
    }
}

/// Parses a spec string; `seed` is recorded in the spec.
pub fn parse_variety(text: &str, seed: u64) -> Result<VarietySpec, CliError> {
    let p = split(text)?;
    let constructor = match p.name.as_str() {
        "veronese" => {
            p.allow(&[])?;
            let (n, r) = p.pair()?;
            Constructor::Veronese { n, r }
        }
        "segre" => {
            p.allow(&[])?;
            let (n, m) = p.pair()?;
            Constructor::Segre { n, m }
        }
        "scroll" => {
            p.allow(&[])?;
            Constructor::Scroll { e: numbers("scroll", &p.positional)? }
        }
        "ci" | "complete-intersection" => {
            p.allow(&[])?;
            let v: Vec<u32> = numbers("ci", &p.positional)?;
            if v.len() < 2 {
                return Err(CliError::Spec("ci needs the ambient dimension followed by degrees".into()));
            }
            Constructor::CompleteIntersection { n: v[0] as usize, degrees: v[1..].to_vec() }
        }
        "plane-canonical" => {
            p.allow(&[])?;
            Constructor::PlaneCanonical { d: p.single()? }
        }
        "plane-extension" => {
            p.allow(&[])?;
            Constructor::PlaneExtension { d: p.single()? }
        }
        "tetragonal" => {
            p.allow(&["b"])?;
            let b = p.keys.get("b").ok_or_else(|| CliError::Spec("tetragonal needs b=b1,b2".into()))?;
            Constructor::Tetragonal { e: fixed("tetragonal twists", &p.positional)?, b: fixed("b", b)? }
        }
        "pentagonal" => {
            p.allow(&["g", "b"])?;
            match (p.keys.get("g"), p.keys.get("b")) {
                (Some(g), None) => {
                    p.no_positional()?;
                    let [g] = fixed::<1>("g", g)?;
                    let (e, b) = pentagonal_defaults(g).ok_or_else(|| {
                        CliError::Spec(format!("no default pentagonal twists for g={g}; give e1..e4,b=b1..b5"))
                    })?;
                    Constructor::Pentagonal { e, b }
                }
                (None, Some(b)) => Constructor::Pentagonal { e: fixed("pentagonal twists", &p.positional)?, b: fixed("b", b)? },
                _ => return Err(CliError::Spec("pentagonal needs either g=.. or e1,..,e4,b=b1,..,b5".into())),
            }
        }
        "g25" => {
            p.allow(&["realization"])?;
            p.no_positional()?;
            let realization = match p.keys.get("realization").map(|v| v.join(",")) {
                None => Realization::Points,
                Some(r) if r == "points" => Realization::Points,
                Some(r) if r == "symbolic" => Realization::Symbolic,
                Some(r) => return Err(CliError::Spec(format!("unknown realization `{r}`"))),
            };
            Constructor::Grassmannian { realization }
        }
        "points5" => {
            p.allow(&[])?;
            p.no_positional()?;
            Constructor::GorensteinPoints
        }
        other => return Err(CliError::Spec(format!("unknown constructor `{other}`"))),
    };
    Ok(VarietySpec::new(constructor, seed))
}

//! Random query strings drawn from the read-only grammar.
//!
//! Every generated string is meant to parse: variables are bound before use,
//! relationship variables are never reused, and ORDER BY only names returned
//! columns when the query aggregates or is DISTINCT.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const NODE_VARS: [&str; 5] = ["a", "b", "c", "d", "e"];
const LABELS: [&str; 6] = ["Material", "Process", "MaterialFamily", "A", "B", "C"];
const REL_TYPES: [&str; 4] = ["PRINTABLE_BY", "BELONGS_TO", "R", "S"];
const KEYS: [&str; 5] = ["name", "v", "w", "tag", "build_x_mm"];
const STRING_ATOMS: [&str; 12] = ["x", "Ti", "-6Al", " ", "\\'", "\\\\", "\\n", "\\t", "é", "中", "\"", "Inconel 718"];

struct Gen {
    rng: StdRng,
    nodes: Vec<&'static str>,
    rels: Vec<String>,
}

impl Gen {
    fn kw(&mut self, word: &str) -> String {
        match self.rng.gen_range(0..4) {
            0 => word.to_ascii_lowercase(),
            _ => word.to_string(),
        }
    }

    fn ws(&mut self) -> &'static str {
        *[" ", " ", " ", "  ", "\n", "\t "].choose(&mut self.rng).unwrap()
    }

    fn string_literal(&mut self) -> String {
        let n = self.rng.gen_range(0..4);
        let body: String = (0..n).map(|_| *STRING_ATOMS.choose(&mut self.rng).unwrap()).collect();
        if self.rng.gen_bool(0.2) && !body.contains('"') {
            // double-quoted form: an escaped single quote is still legal inside
            format!("\"{body}\"")
        } else {
            format!("'{}'", body.replace('"', ""))
        }
    }

    fn literal(&mut self) -> String {
        match self.rng.gen_range(0..5) {
            0 => self.string_literal(),
            1 => self.rng.gen_range(0..10_000).to_string(),
            2 => format!("{}", self.rng.gen_range(0..100_000) as f64 / 100.0),
            3 => format!("{}.{:02}", self.rng.gen_range(0..50), self.rng.gen_range(0..100)),
            _ => {
                let word = if self.rng.gen() { "TRUE" } else { "FALSE" };
                self.kw(word)
            }
        }
    }

    fn node(&mut self, fresh_ok: bool) -> String {
        let var = if self.rng.gen_bool(0.8) {
            let pick = if fresh_ok || self.nodes.is_empty() {
                *NODE_VARS.choose(&mut self.rng).unwrap()
            } else {
                *self.nodes.choose(&mut self.rng).unwrap()
            };
            if !self.nodes.contains(&pick) {
                self.nodes.push(pick);
            }
            pick.to_string()
        } else {
            String::new()
        };
        let label = if self.rng.gen_bool(0.6) { format!(":{}", LABELS.choose(&mut self.rng).unwrap()) } else { String::new() };
        let props = if self.rng.gen_bool(0.3) {
            let n = self.rng.gen_range(1..3);
            let mut keys: Vec<&str> = KEYS.choose_multiple(&mut self.rng, n).copied().collect();
            keys.sort();
            let pairs: Vec<String> = keys.iter().map(|k| format!("{k}: {}", self.literal())).collect();
            format!(" {{{}}}", pairs.join(", "))
        } else {
            String::new()
        };
        format!("({var}{label}{props})")
    }

    fn rel(&mut self) -> String {
        let var = if self.rng.gen_bool(0.3) {
            let v = format!("r{}", self.rels.len() + 1);
            self.rels.push(v.clone());
            v
        } else {
            String::new()
        };
        let ty = if self.rng.gen_bool(0.8) { format!(":{}", REL_TYPES.choose(&mut self.rng).unwrap()) } else { String::new() };
        let inner = format!("{var}{ty}");
        match self.rng.gen_range(0..3) {
            0 => format!("-[{inner}]->"),
            1 => format!("<-[{inner}]-"),
            _ => format!("-[{inner}]-"),
        }
    }

    fn pattern(&mut self) -> String {
        let mut out = self.node(true);
        for _ in 0..self.rng.gen_range(0..4) {
            out.push_str(&self.rel());
            out.push_str(&self.node(true));
        }
        out
    }

    fn property(&mut self) -> String {
        let var = *self.nodes.choose(&mut self.rng).unwrap();
        format!("{var}.{}", KEYS.choose(&mut self.rng).unwrap())
    }

    fn predicate(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            return match self.rng.gen_range(0..6) {
                0 => format!("{} {} {}", self.property(), ["=", "<>", "<", "<=", ">", ">="].choose(&mut self.rng).unwrap(), self.literal()),
                1 => format!("{} {} {}", self.property(), ["=", "<", ">="].choose(&mut self.rng).unwrap(), self.property()),
                2 => {
                    let n = self.rng.gen_range(0..4);
                    let items: Vec<String> = (0..n).map(|_| self.literal()).collect();
                    let kw = self.kw("IN");
                    format!("{} {kw} [{}]", self.property(), items.join(", "))
                }
                3 => {
                    let kw = self.kw("CONTAINS");
                    format!("{} {kw} {}", self.property(), self.string_literal())
                }
                4 => {
                    let kw = self.kw("NOT");
                    format!("{kw} {}", self.predicate(0))
                }
                _ => format!("({})", self.predicate(0)),
            };
        }
        match self.rng.gen_range(0..4) {
            0 => {
                let kw = self.kw("NOT");
                format!("{kw} ({})", self.predicate(depth - 1))
            }
            1 => format!("({})", self.predicate(depth - 1)),
            k => {
                let op = self.kw(if k == 2 { "AND" } else { "OR" });
                let n = self.rng.gen_range(2..4);
                let parts: Vec<String> = (0..n).map(|_| self.predicate(depth - 1)).collect();
                parts.join(&format!(" {op} "))
            }
        }
    }

    fn return_expr(&mut self, aggregate: bool) -> String {
        if aggregate && self.rng.gen_bool(0.5) {
            return match self.rng.gen_range(0..4) {
                0 => format!("{}(*)", self.kw("count")),
                1 => format!("{}({})", self.kw("count"), self.nodes.choose(&mut self.rng).unwrap()),
                2 => format!("{}({})", self.kw("count"), self.property()),
                _ => format!("{}({})", self.kw("collect"), self.property()),
            };
        }
        if self.rng.gen_bool(0.2) {
            self.nodes.choose(&mut self.rng).unwrap().to_string()
        } else {
            self.property()
        }
    }

    fn query(&mut self) -> String {
        self.nodes.clear();
        self.rels.clear();
        let mut out = String::new();
        for i in 0..self.rng.gen_range(1..3) {
            if i > 0 {
                out.push_str(self.ws());
            }
            let kw = self.kw("MATCH");
            let n = self.rng.gen_range(1..3);
            let patterns: Vec<String> = (0..n).map(|_| self.pattern()).collect();
            out.push_str(&format!("{kw} {}", patterns.join(", ")));
        }
        if self.nodes.is_empty() {
            out.push_str(", (a)");
            self.nodes.push("a");
        }
        if self.rng.gen_bool(0.6) {
            let ws = self.ws();
            let kw = self.kw("WHERE");
            let depth = self.rng.gen_range(0..4);
            out.push_str(&format!("{ws}{kw} {}", self.predicate(depth)));
        }

        let aggregate = self.rng.gen_bool(0.3);
        let distinct = !aggregate && self.rng.gen_bool(0.3);
        let mut exprs: Vec<String> = Vec::new();
        for _ in 0..self.rng.gen_range(1..4) {
            let e = self.return_expr(aggregate);
            if !exprs.contains(&e) {
                exprs.push(e);
            }
        }
        let mut items = Vec::new();
        let mut names = Vec::new();
        for (i, e) in exprs.iter().enumerate() {
            if self.rng.gen_bool(0.3) {
                let alias = format!("col{i}");
                items.push(format!("{e} {} {alias}", self.kw("AS")));
                names.push(alias);
            } else {
                items.push(e.clone());
                names.push(e.clone());
            }
        }
        let ws = self.ws();
        let kw = self.kw("RETURN");
        out.push_str(&format!("{ws}{kw} "));
        if distinct {
            out.push_str(&format!("{} ", self.kw("DISTINCT")));
        }
        out.push_str(&items.join(", "));

        if self.rng.gen_bool(0.5) {
            let mut keys = Vec::new();
            for _ in 0..self.rng.gen_range(1..3) {
                let key = if aggregate || distinct || self.rng.gen() {
                    names.choose(&mut self.rng).unwrap().clone()
                } else {
                    self.property()
                };
                let dir = match self.rng.gen_range(0..3) {
                    0 => format!(" {}", self.kw("ASC")),
                    1 => format!(" {}", self.kw("DESC")),
                    _ => String::new(),
                };
                keys.push(format!("{key}{dir}"));
            }
            let ws = self.ws();
            let order = self.kw("ORDER");
            let by = self.kw("BY");
            out.push_str(&format!("{ws}{order} {by} {}", keys.join(", ")));
        }
        if self.rng.gen_bool(0.4) {
            let ws = self.ws();
            let kw = self.kw("LIMIT");
            out.push_str(&format!("{ws}{kw} {}", self.rng.gen_range(0..50)));
        }
        out
    }
}

pub fn grammar_strings(count: usize, seed: u64) -> Vec<String> {
    let mut g = Gen { rng: StdRng::seed_from_u64(seed), nodes: Vec::new(), rels: Vec::new() };
    (0..count).map(|_| g.query()).collect()
}

/// Read-only queries with a write clause spliced in.
pub fn write_strings(seed: u64) -> Vec<String> {
    let mut out: Vec<String> = [
        "MATCH (m:Material) DELETE m",
        "MATCH (m:Material) DETACH DELETE m",
        "CREATE (m:Material {name: 'Unobtainium'})",
        "MERGE (p:Process {name: 'Laser PBF'}) RETURN p",
        "MATCH (m:Material) SET m.name = 'x' RETURN m.name",
        "MATCH (m:Material) REMOVE m.name RETURN m",
        "DROP INDEX material_name",
        "match (m) delete m",
        "MATCH (a)-[r:PRINTABLE_BY]->(b) DELETE r RETURN a.name",
        "MATCH (m:Material) RETURN m.name; CREATE (x:Material)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rng = StdRng::seed_from_u64(seed);
    for base in grammar_strings(40, seed) {
        let clause = *["DELETE a", "SET a.v = 1", "REMOVE a.v", "CREATE (z)", "MERGE (z)", "DETACH DELETE a"]
            .choose(&mut rng)
            .unwrap();
        let at = base.find(" RETURN ").or_else(|| base.find(" return ")).unwrap_or(base.len());
        out.push(format!("{} {clause}{}", &base[..at], &base[at..]));
    }
    out
}

use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};
use pregel_channels::graph::{
    gen_chain, gen_gnp, gen_random_tree, gen_rmat, Directedness, Graph, RmatParams,
};

/// Defaults a generator falls back to when the spec leaves them open.
pub struct Defaults {
    pub seed: u64,
    pub directed: bool,
    pub weighted: bool,
}

/// Builds a graph from an inline spec such as `rmat:scale=10,ef=16,seed=1`.
///
/// Generators: `rmat` (scale, ef, seed, a, b, c, d, weighted, directed,
/// wmin, wmax), `chain` (n), `tree` (n, seed), `gnp` (n, p, seed, directed).
pub fn generate(spec: &str, defaults: &Defaults) -> Result<Graph> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = Params::parse(rest)?;
    let dir = |d: bool| if d { Directedness::Directed } else { Directedness::Undirected };
    let g = match name {
        "rmat" => {
            let mut p = RmatParams::new(kv.take("scale")?.unwrap_or(10), kv.take("ef")?.unwrap_or(16), defaults.seed);
            p.seed = kv.take("seed")?.unwrap_or(p.seed);
            p.a = kv.take("a")?.unwrap_or(p.a);
            p.b = kv.take("b")?.unwrap_or(p.b);
            p.c = kv.take("c")?.unwrap_or(p.c);
            p.d = kv.take("d")?.unwrap_or(p.d);
            p.weighted = kv.take("weighted")?.unwrap_or(defaults.weighted);
            p.directed = kv.take("directed")?.unwrap_or(defaults.directed);
            p.weight_range.0 = kv.take("wmin")?.unwrap_or(p.weight_range.0);
            p.weight_range.1 = kv.take("wmax")?.unwrap_or(p.weight_range.1);
            gen_rmat(&p)?
        }
        "chain" => gen_chain(kv.require("n")?),
        "tree" => {
            let n = kv.require("n")?;
            gen_random_tree(n, kv.take("seed")?.unwrap_or(defaults.seed))
        }
        "gnp" => {
            let n = kv.require("n")?;
            let p: f64 = kv.require("p")?;
            if !(0.0..=1.0).contains(&p) {
                bail!("gnp: p = {p} is not a probability");
            }
            let seed = kv.take("seed")?.unwrap_or(defaults.seed);
            gen_gnp(n, p, seed, dir(kv.take("directed")?.unwrap_or(defaults.directed)))
        }
        other => bail!("unknown generator {other:?} (expected rmat, chain, tree or gnp)"),
    };
    kv.finish(name)?;
    Ok(g)
}

struct Params(HashMap<String, String>);

impl Params {
    fn parse(s: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                bail!("parameter {k:?} given twice");
            }
        }
        Ok(Params(map))
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| anyhow!("invalid value {v:?} for {key}")),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?.with_context(|| format!("missing parameter {key}"))
    }

    fn finish(self, name: &str) -> Result<()> {
        let mut left: Vec<_> = self.0.into_keys().collect();
        left.sort();
        if !left.is_empty() {
            bail!("{name}: unknown parameter(s) {}", left.join(", "));
        }
        Ok(())
    }
}

//! Flag parsing and config-file merging. Every subcommand's flags mirror an
//! all-optional serde struct; a JSON config file (via --config) supplies
//! defaults and explicit flags override it. Unknown config keys are
//! rejected.

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use num_complex::Complex64 as C64;
use serde::Deserialize;

use charur::algebra::{RepKind, RepSpec};
use charur::states::StateFamily;

/// "RE" or "RE,IM".
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(C64::new(re.trim().parse()?, 0.0)),
        [re, im] => Ok(C64::new(re.trim().parse()?, im.trim().parse()?)),
        _ => bail!("expected RE or RE,IM, got {s:?}"),
    }
}

pub fn parse_orders(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(Into::into))
        .collect()
}

/// "START:STOP:STEP".
pub fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("expected START:STOP:STEP, got {s:?}");
    }
    Ok((
        parts[0].trim().parse()?,
        parts[1].trim().parse()?,
        parts[2].trim().parse()?,
    ))
}

/// Truncation dimension: a number, or "auto".
#[derive(Debug, Clone, PartialEq)]
pub enum DimArg {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for DimArg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(DimArg::Auto)
        } else {
            Ok(DimArg::Fixed(
                s.parse().context("dim must be a number or 'auto'")?,
            ))
        }
    }
}

fn parse_kind(s: &str) -> Result<RepKind> {
    match s {
        "su2" => Ok(RepKind::Su2),
        "su11" => Ok(RepKind::Su11),
        "fock" => Ok(RepKind::Fock),
        other => bail!("unknown representation {other:?} (su2|su11|fock)"),
    }
}

/// Shared representation/state flags, mirrored by the config file schema.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SystemArgs {
    /// Representation: su2 | su11 | fock
    #[arg(long)]
    pub rep: Option<String>,
    /// Spin j (su2; dim is forced to 2j+1)
    #[arg(long, allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// Bargmann index k (su11)
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Mode count (fock; 1 or 2)
    #[arg(long)]
    pub modes: Option<usize>,
    /// Truncation dimension per mode, or "auto"
    #[arg(long)]
    pub dim: Option<String>,
    /// State family: vacuum | fock | su11_cs | su11_lowest | bloch | bg |
    /// algebraic | squeezed | even | odd
    #[arg(long)]
    pub state: Option<String>,
    /// ζ for su11_cs (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    /// τ for bloch (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// z for bg / algebraic (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// α for even/odd (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// squeezing r for squeezed
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Fock level n for fock
    #[arg(long)]
    pub n: Option<usize>,
    /// u for algebraic (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// v for algebraic (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// w for algebraic (RE or RE,IM)
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
}

macro_rules! overlay {
    ($cli:expr, $file:expr, $($field:ident),+ $(,)?) => {
        $( if $cli.$field.is_none() { $cli.$field = $file.$field.take(); } )+
    };
}

impl SystemArgs {
    pub fn merge_under(&mut self, mut file: SystemArgs) {
        overlay!(self, file, rep, j, k, modes, dim, state, zeta, tau, z, alpha, r, n, u, v, w);
    }

    /// The representation spec at a concrete dimension (`fallback_dim` is
    /// used when --dim is auto or absent; auto-ness is reported separately).
    pub fn rep_spec(&self, fallback_dim: usize) -> Result<RepSpec> {
        let kind = parse_kind(
            self.rep
                .as_deref()
                .ok_or_else(|| anyhow!("--rep is required"))?,
        )?;
        let spec = match kind {
            RepKind::Su2 => RepSpec::su2(self.j.ok_or_else(|| anyhow!("su2 needs --j"))?)?,
            RepKind::Su11 => RepSpec::su11(
                self.k.ok_or_else(|| anyhow!("su11 needs --k"))?,
                self.fixed_dim().unwrap_or(fallback_dim),
            )?,
            RepKind::Fock => RepSpec::fock(
                self.modes.unwrap_or(1),
                self.fixed_dim().unwrap_or(fallback_dim),
            )?,
        };
        Ok(spec)
    }

    pub fn dim_arg(&self) -> Result<DimArg> {
        match &self.dim {
            None => Ok(DimArg::Auto),
            Some(s) => s.parse(),
        }
    }

    pub fn fixed_dim(&self) -> Option<usize> {
        match self.dim_arg() {
            Ok(DimArg::Fixed(d)) => Some(d),
            _ => None,
        }
    }

    fn complex_param(&self, name: &str, value: &Option<String>) -> Result<C64> {
        parse_complex(
            value
                .as_deref()
                .ok_or_else(|| anyhow!("state family needs --{name}"))?,
        )
    }

    pub fn state_family(&self) -> Result<StateFamily> {
        let name = self
            .state
            .as_deref()
            .ok_or_else(|| anyhow!("--state is required"))?;
        Ok(match name {
            "vacuum" => StateFamily::Vacuum,
            "fock" => StateFamily::Fock {
                n: self.n.ok_or_else(|| anyhow!("fock needs --n"))?,
            },
            "su11_cs" => StateFamily::Su11Cs {
                zeta: self.complex_param("zeta", &self.zeta)?,
            },
            "su11_lowest" => StateFamily::Su11Lowest,
            "bloch" => StateFamily::Bloch {
                tau: self.complex_param("tau", &self.tau)?,
            },
            "bg" => StateFamily::BgCs {
                z: self.complex_param("z", &self.z)?,
            },
            "algebraic" => StateFamily::Algebraic {
                u: self.complex_param("u", &self.u)?,
                v: self.complex_param("v", &self.v)?,
                w: self.complex_param("w", &self.w)?,
                z: self.complex_param("z", &self.z)?,
            },
            "squeezed" => StateFamily::SqueezedVacuum {
                r: self.r.ok_or_else(|| anyhow!("squeezed needs --r"))?,
            },
            "even" => StateFamily::EvenCs {
                alpha: self.complex_param("alpha", &self.alpha)?,
            },
            "odd" => StateFamily::OddCs {
                alpha: self.complex_param("alpha", &self.alpha)?,
            },
            other => bail!("unknown state family {other:?}"),
        })
    }
}

/// Loads a JSON config file section for one subcommand.
pub fn load_config<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Resolves the output path against CHARUR_OUT_DIR for bare relative paths.
pub fn resolve_out(path: &std::path::Path) -> std::path::PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("CHARUR_OUT_DIR") {
        Some(dir) if !dir.is_empty() => std::path::Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5,-0.2").unwrap(), C64::new(0.5, -0.2));
        assert!(parse_complex("a,b,c").is_err());
    }

    #[test]
    fn dim_arg_parsing() {
        assert_eq!("auto".parse::<DimArg>().unwrap(), DimArg::Auto);
        assert_eq!("64".parse::<DimArg>().unwrap(), DimArg::Fixed(64));
        assert!("x".parse::<DimArg>().is_err());
    }

    #[test]
    fn overlay_prefers_cli() {
        let mut cli = SystemArgs {
            rep: Some("su11".into()),
            k: Some(0.5),
            ..SystemArgs::default()
        };
        let file = SystemArgs {
            rep: Some("su2".into()),
            k: Some(0.25),
            dim: Some("64".into()),
            ..SystemArgs::default()
        };
        cli.merge_under(file);
        assert_eq!(cli.rep.as_deref(), Some("su11"));
        assert_eq!(cli.k, Some(0.5));
        assert_eq!(cli.dim.as_deref(), Some("64"));
    }
}

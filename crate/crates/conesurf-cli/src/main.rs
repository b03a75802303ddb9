//! `conesurf`: validate, measure, develop, and classify piecewise-flat
//! surfaces from the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::value::RawValue;

use conesurf::builders::{self, BuildParams, ModelSpec};
use conesurf::cohomology::{
    coboundary_vector, h1_dimension, z1_dimension, Character, Presentation, Word,
};
use conesurf::develop::{develop_path, holonomy_of_loop, DualLoop, DualStep};
use conesurf::geom::{DEFAULT_TOL, SE2};
use conesurf::rep::{classify_xi, dm_condition, validate_marking, BetaVector, Marking};
use conesurf::surface::{EdgeRef, SurfaceComplex};

#[derive(Parser)]
#[command(
    name = "conesurf",
    version,
    about = "Piecewise-flat surfaces: invariants, developing maps, holonomy, and classification"
)]
struct Cli {
    /// Numerical tolerance (overrides the surface file's own setting)
    #[arg(long, global = true, env = "CONESURF_TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check a surface file against the structural invariants
    Validate {
        surface: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Euler characteristic, area, cone angles, and Gauss-Bonnet residual
    Invariants {
        surface: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Develop a dual path into the plane
    Develop {
        surface: PathBuf,
        /// Inline path, e.g. "t0:1,t1:0"
        #[arg(long, conflicts_with = "loop_file")]
        path: Option<String>,
        /// Loop file {"base":...,"steps":[[tri,edge],...]}
        #[arg(long = "loop")]
        loop_file: Option<PathBuf>,
        /// Also write the developed chain as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0)]
        svg_scale: f64,
    },
    /// Holonomy of a closed dual loop
    Holonomy {
        surface: PathBuf,
        #[arg(long, conflicts_with = "loop_file")]
        path: Option<String>,
        #[arg(long = "loop")]
        loop_file: Option<PathBuf>,
    },
    /// Classify a marked surface as a point of T^2g x CP^(2g+n-3)
    Classify {
        surface: PathBuf,
        #[arg(long)]
        marking: PathBuf,
        /// Comma-separated singularity orders, one per puncture
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Split both triangles of a hinge at a point of the shared edge
    Subdivide {
        surface: PathBuf,
        /// Edge to split, e.g. "t0:1"
        #[arg(long)]
        edge: String,
        /// Split parameter in (0,1)
        #[arg(long = "t", default_value_t = 0.5)]
        t_param: f64,
        /// Marking file whose loops are carried over to the refined surface
        #[arg(long)]
        remap: Option<PathBuf>,
    },
    /// Build a reference model and write its files
    Build {
        /// One of: tetrahedron, cube, flat_torus, double_polygon
        kind: String,
        #[arg(long)]
        edge: Option<f64>,
        /// Periods "re1,im1,re2,im2" for flat_torus
        #[arg(long, allow_hyphen_values = true)]
        periods: Option<String>,
        /// Polygon "x0,y0,x1,y1,..." for double_polygon
        #[arg(long, allow_hyphen_values = true)]
        polygon: Option<String>,
        /// Output file prefix (default: the kind name)
        #[arg(long)]
        out: Option<String>,
    },
    /// Deligne-Mostow integrality test for cone-sphere orders
    DmCheck {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Cocycle and cohomology dimensions for a presented group
    Cohom {
        #[arg(long)]
        generators: usize,
        /// Character values "re,im,..." per generator (default: trivial)
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
        /// Relator words, letters a..z with uppercase inverses, separated
        /// by ";" (e.g. "abAB")
        #[arg(long, default_value = "")]
        relators: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse number {s:?}"))
        })
        .collect()
}

fn parse_complex_pairs(text: &str) -> Result<Vec<Complex64>> {
    let floats = parse_floats(text)?;
    if floats.len() % 2 != 0 {
        bail!("expected an even number of values (re,im pairs)");
    }
    Ok(floats
        .chunks(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

fn parse_edge_ref(text: &str) -> Result<EdgeRef> {
    let (tri, edge) = text
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("edge must look like triangle:index, got {text:?}"))?;
    Ok(EdgeRef::new(tri, edge.parse::<u8>()?))
}

fn parse_steps(text: &str) -> Result<Vec<DualStep>> {
    text.split(',')
        .map(|part| {
            let e = parse_edge_ref(part.trim())?;
            Ok(DualStep::new(e.triangle, e.edge))
        })
        .collect()
}

#[derive(serde::Deserialize, serde::Serialize)]
struct LoopFile {
    base: String,
    steps: Vec<(String, u8)>,
}

fn load_loop(
    path: &Option<String>,
    loop_file: &Option<PathBuf>,
) -> Result<(String, Vec<DualStep>)> {
    match (path, loop_file) {
        (Some(p), None) => {
            let steps = parse_steps(p)?;
            let base = steps
                .first()
                .map(|s| s.triangle.clone())
                .ok_or_else(|| anyhow!("empty path"))?;
            Ok((base, steps))
        }
        (None, Some(f)) => {
            let bytes = fs::read(f).with_context(|| format!("cannot read {}", f.display()))?;
            let file: LoopFile = serde_json::from_slice(&bytes)?;
            Ok((
                file.base,
                file.steps
                    .into_iter()
                    .map(|(t, e)| DualStep::new(t, e))
                    .collect(),
            ))
        }
        _ => bail!("provide exactly one of --path or --loop"),
    }
}

fn load_surface(path: &PathBuf, tol: Option<f64>) -> Result<SurfaceComplex> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    SurfaceComplex::parse_with_tol(&bytes, tol).map_err(Into::into)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { surface, format } => {
            #[derive(serde::Serialize)]
            struct Valid {
                valid: bool,
                triangles: usize,
                gluings: usize,
                vertices: usize,
                chi: i64,
            }
            match load_surface(&surface, cli.tol) {
                Ok(s) => {
                    let out = Valid {
                        valid: true,
                        triangles: s.charts().len(),
                        gluings: s.gluing_count(),
                        vertices: s.vertex_classes().len(),
                        chi: s.euler_characteristic(),
                    };
                    match format {
                        Format::Json => println!("{}", serde_json::to_string(&out)?),
                        Format::Text => println!(
                            "valid: {} triangles, {} gluings, {} vertices, chi = {}",
                            out.triangles, out.gluings, out.vertices, out.chi
                        ),
                    }
                    Ok(())
                }
                Err(e) => {
                    match format {
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string(&serde_json::json!({
                                "valid": false,
                                "error": e.to_string(),
                            }))?
                        ),
                        Format::Text => println!("invalid: {e}"),
                    }
                    Err(e)
                }
            }
        }

        Command::Invariants { surface, format } => {
            let s = load_surface(&surface, cli.tol)?;
            #[derive(serde::Serialize)]
            struct VertexOut {
                id: String,
                theta: f64,
                beta: f64,
            }
            #[derive(serde::Serialize)]
            struct Out {
                chi: i64,
                genus: Option<u32>,
                area: f64,
                vertices: Vec<VertexOut>,
                gauss_bonnet_residual: f64,
            }
            let out = Out {
                chi: s.euler_characteristic(),
                genus: s.genus().ok(),
                area: s.total_area(),
                vertices: s
                    .vertex_classes()
                    .iter()
                    .map(|v| VertexOut {
                        id: v.id.clone(),
                        theta: s.cone_angle(v),
                        beta: s.singularity_order(v),
                    })
                    .collect(),
                gauss_bonnet_residual: s.gauss_bonnet_residual(),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string(&out)?),
                Format::Text => {
                    println!(
                        "chi = {}, genus = {}, area = {}",
                        out.chi,
                        out.genus.map_or("n/a".into(), |g| g.to_string()),
                        out.area
                    );
                    for v in &out.vertices {
                        println!("  {}: theta = {}, beta = {}", v.id, v.theta, v.beta);
                    }
                    println!("gauss-bonnet residual = {}", out.gauss_bonnet_residual);
                }
            }
            Ok(())
        }

        Command::Develop {
            surface,
            path,
            loop_file,
            svg,
            svg_scale,
        } => {
            if !svg_scale.is_finite() || svg_scale <= 0.0 {
                bail!("--svg-scale must be positive");
            }
            let s = load_surface(&surface, cli.tol)?;
            let (base, steps) = load_loop(&path, &loop_file)?;
            let chain = develop_path(&s, &base, SE2::identity(), &steps)?;
            if let Some(svg_path) = svg {
                fs::write(&svg_path, chain.to_svg(&s, svg_scale))
                    .with_context(|| format!("cannot write {}", svg_path.display()))?;
            }
            println!("{}", chain.to_json(&s));
            Ok(())
        }

        Command::Holonomy {
            surface,
            path,
            loop_file,
        } => {
            let s = load_surface(&surface, cli.tol)?;
            let (base, steps) = load_loop(&path, &loop_file)?;
            let l = DualLoop::new(base, steps);
            let h = holonomy_of_loop(&s, &l)?;
            #[derive(serde::Serialize)]
            struct Out {
                u: [f64; 2],
                v: [f64; 2],
                angle: f64,
                fixed_point: Option<[f64; 2]>,
            }
            let tol = cli.tol.unwrap_or(s.tol());
            let out = Out {
                u: pair(h.u()),
                v: pair(h.v()),
                angle: h.angle(),
                fixed_point: h.fixed_point(tol).ok().map(pair),
            };
            println!("{}", serde_json::to_string(&out)?);
            Ok(())
        }

        Command::Classify {
            surface,
            marking,
            beta,
        } => {
            let s = load_surface(&surface, cli.tol)?;
            let bytes =
                fs::read(&marking).with_context(|| format!("cannot read {}", marking.display()))?;
            let m = Marking::parse(&bytes)?;
            let beta = BetaVector::new(parse_floats(&beta)?)?;
            if beta.len() != m.puncture_count() {
                bail!(
                    "{} beta values for {} punctures",
                    beta.len(),
                    m.puncture_count()
                );
            }
            // the orders must describe the metric, not just the marking
            let tol = cli.tol.unwrap_or(s.tol());
            for (j, (&b, p)) in beta.values().iter().zip(&m.punctures).enumerate() {
                let measured = s.singularity_order(s.vertex_class(p)?);
                if (b - measured).abs() > tol {
                    bail!(
                        "beta[{j}] = {b} disagrees with the measured order {measured} of {p}"
                    );
                }
            }
            let report = validate_marking(&s, &m, &beta)?;
            if !report.passed() {
                bail!("marking fails validation: {:?}", report.failed_checks());
            }
            let xi = classify_xi(&s, &m, &beta)?;
            println!("{}", xi.to_json());
            Ok(())
        }

        Command::Subdivide {
            surface,
            edge,
            t_param,
            remap,
        } => {
            let s = load_surface(&surface, cli.tol)?;
            let edge = parse_edge_ref(&edge)?;
            let (refined, record) = s.hinge_subdivide(&edge, t_param)?;
            let marking_json = match remap {
                None => None,
                Some(path) => {
                    let bytes = fs::read(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    let m = Marking::parse(&bytes)?;
                    let base = record
                        .pieces_of(&m.base)
                        .map(|(a, _)| a.to_string())
                        .unwrap_or_else(|| m.base.clone());
                    let carry = |loops: &[DualLoop]| -> Result<Vec<DualLoop>> {
                        loops.iter().map(|l| Ok(record.remap_loop(l)?)).collect()
                    };
                    let remapped = Marking {
                        base,
                        a_loops: carry(&m.a_loops)?,
                        b_loops: carry(&m.b_loops)?,
                        c_loops: carry(&m.c_loops)?,
                        punctures: m
                            .punctures
                            .iter()
                            .map(|p| carry_class(&s, &refined, &record, p))
                            .collect::<Result<_>>()?,
                    };
                    Some(remapped.to_json())
                }
            };
            #[derive(serde::Serialize)]
            struct Out<'a> {
                surface: &'a RawValue,
                #[serde(skip_serializing_if = "Option::is_none")]
                marking: Option<&'a RawValue>,
                new_vertex: &'a str,
            }
            let surface_raw = RawValue::from_string(refined.to_json())?;
            let marking_raw = marking_json.map(RawValue::from_string).transpose()?;
            let out = Out {
                surface: &surface_raw,
                marking: marking_raw.as_deref(),
                new_vertex: record.new_vertex_class(),
            };
            println!("{}", serde_json::to_string(&out)?);
            Ok(())
        }

        Command::Build {
            kind,
            edge,
            periods,
            polygon,
            out,
        } => {
            let periods = periods
                .as_deref()
                .map(|p| -> Result<(Complex64, Complex64)> {
                    let v = parse_complex_pairs(p)?;
                    if v.len() != 2 {
                        bail!("--periods needs exactly four numbers re1,im1,re2,im2");
                    }
                    Ok((v[0], v[1]))
                })
                .transpose()?;
            let polygon = polygon.as_deref().map(parse_complex_pairs).transpose()?;
            let spec = ModelSpec {
                kind: kind.clone(),
                params: BuildParams {
                    edge,
                    periods,
                    polygon,
                },
            };
            let model = builders::build_model(&spec)?;
            let prefix = out.unwrap_or_else(|| kind.clone());
            let mut files = Vec::new();
            let surface_path = format!("{prefix}.surface.json");
            fs::write(&surface_path, model.surface.to_json())
                .with_context(|| format!("cannot write {surface_path}"))?;
            files.push(surface_path);
            if let Some(m) = &model.marking {
                let path = format!("{prefix}.marking.json");
                fs::write(&path, m.to_json()).with_context(|| format!("cannot write {path}"))?;
                files.push(path);
            }
            if !model.loops.is_empty() {
                let path = format!("{prefix}.loops.json");
                let loops: BTreeMap<String, LoopFile> = model
                    .loops
                    .iter()
                    .map(|(name, l)| {
                        (
                            name.clone(),
                            LoopFile {
                                base: l.base.clone(),
                                steps: l
                                    .steps
                                    .iter()
                                    .map(|s| (s.triangle.clone(), s.edge))
                                    .collect(),
                            },
                        )
                    })
                    .collect();
                fs::write(&path, serde_json::to_string(&loops)?)
                    .with_context(|| format!("cannot write {path}"))?;
                files.push(path);
            }
            #[derive(serde::Serialize)]
            struct Out {
                kind: String,
                files: Vec<String>,
                chi: i64,
                vertices: usize,
                beta: Option<Vec<f64>>,
            }
            let out = Out {
                kind,
                files,
                chi: model.surface.euler_characteristic(),
                vertices: model.surface.vertex_classes().len(),
                beta: model.beta.as_ref().map(|b| b.values().to_vec()),
            };
            println!("{}", serde_json::to_string(&out)?);
            Ok(())
        }

        Command::DmCheck { beta, format } => {
            let beta = BetaVector::new(parse_floats(&beta)?)?;
            let satisfied = dm_condition(&beta)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&serde_json::json!({ "satisfied": satisfied }))?
                ),
                Format::Text => println!(
                    "{}",
                    if satisfied {
                        "satisfied"
                    } else {
                        "not satisfied"
                    }
                ),
            }
            Ok(())
        }

        Command::Cohom {
            generators,
            rho,
            relators,
        } => {
            if generators == 0 || generators > 26 {
                bail!("--generators must be between 1 and 26");
            }
            let rho = match rho {
                None => Character::trivial(generators),
                Some(text) => {
                    let values = parse_complex_pairs(&text)?;
                    if values.len() != generators {
                        bail!(
                            "--rho needs {generators} complex values, got {}",
                            values.len()
                        );
                    }
                    Character::new(values)
                }
            };
            let mut words: Vec<Word> = Vec::new();
            for part in relators.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let mut word = Vec::new();
                for ch in part.chars() {
                    let (idx, exp) = if ch.is_ascii_lowercase() {
                        ((ch as u8 - b'a') as usize, 1i8)
                    } else if ch.is_ascii_uppercase() {
                        ((ch as u8 - b'A') as usize, -1i8)
                    } else {
                        bail!("relator letters must be ascii letters, got {ch:?}");
                    };
                    if idx >= generators {
                        bail!("letter {ch:?} is outside the {generators} generators");
                    }
                    word.push((idx, exp));
                }
                words.push(word);
            }
            let names = (0..generators)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect();
            let p = Presentation::new(names, words);
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            let z1 = z1_dimension(&p, &rho, tol)?;
            let h1 = h1_dimension(&p, &rho, tol)?;
            let b1 = if coboundary_vector(&rho).norm() <= tol {
                0
            } else {
                1
            };
            #[derive(serde::Serialize)]
            struct Out {
                generators: usize,
                relators: usize,
                z1: usize,
                b1: usize,
                h1: usize,
            }
            println!(
                "{}",
                serde_json::to_string(&Out {
                    generators,
                    relators: p.relators.len(),
                    z1,
                    b1,
                    h1,
                })?
            );
            Ok(())
        }
    }
}

/// The refined-complex vertex class of an old class: a member on an
/// untouched triangle if one exists, otherwise the matching corner of a
/// piece located by chart coordinates.
fn carry_class(
    s: &SurfaceComplex,
    refined: &SurfaceComplex,
    record: &conesurf::surface::SubdivisionRecord,
    class_id: &str,
) -> Result<String> {
    let class = s.vertex_class(class_id)?;
    for (tid, corner) in &class.members {
        if record.pieces_of(tid).is_none() {
            return Ok(refined.class_of_corner(tid, *corner)?.id.clone());
        }
    }
    let (tid, corner) = &class.members[0];
    let z = s
        .chart(tid)
        .ok_or_else(|| anyhow!("missing chart {tid}"))?
        .corners[*corner as usize];
    let (a, b) = record
        .pieces_of(tid)
        .ok_or_else(|| anyhow!("triangle {tid} is neither kept nor split"))?;
    for pid in [a, b] {
        let chart = refined
            .chart(pid)
            .ok_or_else(|| anyhow!("missing piece {pid}"))?;
        for k in 0..3u8 {
            if (chart.corners[k as usize] - z).norm() <= 1e-12 * (1.0 + z.norm()) {
                return Ok(refined.class_of_corner(pid, k)?.id.clone());
            }
        }
    }
    bail!("puncture {class_id} lost by the subdivision")
}

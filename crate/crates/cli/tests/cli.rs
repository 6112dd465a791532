use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const STAR: &str = "gradedwl-model v1
props 0
channels 1
nodes 1 2 3
edge 1 1 2
edge 1 1 3
val 0: 2 3
";

const PATH3: &str = "gradedwl-model v1
channels 1
nodes 1 2 3
edge 1 1 2
edge 1 2 1
edge 1 2 3
edge 1 3 2
";

const CYCLE3: &str = "gradedwl-model v1
channels 1
nodes 1 2 3
edge 1 1 2
edge 1 2 3
edge 1 3 1
edge 1 2 1
edge 1 3 2
edge 1 1 3
";

const CYCLE4: &str = "gradedwl-model v1
channels 1
nodes 1 2 3 4
edge 1 1 2
edge 1 2 3
edge 1 3 4
edge 1 4 1
edge 1 2 1
edge 1 3 2
edge 1 4 3
edge 1 1 4
";

const SOME_SUCCESSOR_P0: &str = "gradedwl-automaton v1
props 0
channels 1
states quiet lit seen
init {} quiet
init {0} lit
on * 1:lit>=1 -> seen
else -> quiet
accept seen
";

const ALWAYS: &str = "gradedwl-automaton v1
props 0
channels 1
states a
init * a
else -> stay
accept a
";

const NEVER: &str = "gradedwl-automaton v1
props 0
channels 1
states a
init * a
else -> stay
";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }
}

fn gradedwl<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gradedwl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_star_counts_two_successors() {
    let w = Workspace::new();
    let m = w.file("star.txt", STAR);
    let o = gradedwl(["check", p(&m), "--point", "1", "<1:2>p0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
    let o = gradedwl(["check", p(&m), "--point", "1", "<1:3>p0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn bad_inputs_exit_nonzero() {
    let w = Workspace::new();
    let m = w.file("star.txt", STAR);
    let o = gradedwl(["check", p(&m), "--point", "1", "<1:2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = gradedwl(["check", p(&m), "--point", "9", "T"]);
    assert_eq!(o.status.code(), Some(3));
    let o = gradedwl(["check", p(&m), "--point", "1", "p7"]);
    assert_ne!(o.status.code(), Some(0));
    let bad = w.file("bad.txt", "gradedwl-model v1\nchannels 1\nnodes 1\nedge 1 1 5\n");
    let o = gradedwl(["check", p(&bad), "--point", "1", "T"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    let o = gradedwl(["check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_errors_carry_the_exit_status() {
    let w = Workspace::new();
    let m = w.file("star.txt", STAR);
    let o = gradedwl(["--json", "check", p(&m), "--point", "9", "T"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exit"], 3);
    let o = gradedwl(["--json", "check", p(&m), "--point", "1", "<1:2>p0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn type_render_and_width() {
    let w = Workspace::new();
    let m = w.file("star.txt", STAR);
    let o = gradedwl(["type", p(&m), "--point", "1", "--depth", "1", "--render"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("(d1 [~p0] (ch1 #2 (=2 (d0 [p0]))))\n"), "{text}");
    assert!(text.contains("formula: "));
    let o = gradedwl(["type", p(&m), "--point", "1", "--depth", "1", "--width", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = gradedwl(["type", p(&m), "--point", "1", "--depth", "2", "--width", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refine_path_stabilises_at_two() {
    let w = Workspace::new();
    let m = w.file("path.txt", PATH3);
    let o = gradedwl(["refine", p(&m), "--stable"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("stable_at: 2"), "{text}");
    assert!(text.contains("classes: 2"), "{text}");
    let o = gradedwl(["refine", p(&m), "--classic", "--trace"]);
    assert!(stdout(&o).contains("round 0"));
    let o = gradedwl(["refine", p(&m), "--rounds", "1"]);
    let text = stdout(&o);
    assert!(text.starts_with("round 1\n") && !text.contains("stable_at"), "{text}");
}

#[test]
fn classic_refinement_rejects_self_loops() {
    let w = Workspace::new();
    let m = w.file("loop.txt", "gradedwl-model v1\nchannels 1\nnodes 1\nedge 1 1 1\n");
    let o = gradedwl(["refine", p(&m), "--classic"]);
    assert_ne!(o.status.code(), Some(0));
    let m = w.file("arc.txt", "gradedwl-model v1\nchannels 1\nnodes 1 2\nedge 1 1 2\n");
    assert_ne!(gradedwl(["refine", p(&m), "--classic"]).status.code(), Some(0));
    assert_eq!(gradedwl(["refine", p(&m), "--classic", "--symmetric"]).status.code(), Some(0));
}

#[test]
fn cycles_are_equivalent_under_both_oracles() {
    let w = Workspace::new();
    let a = w.file("c3.txt", CYCLE3);
    let b = w.file("c4.txt", CYCLE4);
    let o = gradedwl(["distinguish", p(&a), "1", p(&b), "2", "--oracle", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict: equivalent"), "{text}");
    assert!(text.contains("oracles_agree: yes"), "{text}");
}

#[test]
fn path_endpoint_and_middle_are_separated_by_a_verified_formula() {
    let w = Workspace::new();
    let m = w.file("path.txt", PATH3);
    let o = gradedwl(["distinguish", p(&m), "1", p(&m), "2", "--oracle", "both", "--formula"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict: separated"), "{text}");
    assert!(text.contains("separated_at: 1"), "{text}");
    assert!(text.contains("oracles_agree: yes"), "{text}");
    assert!(text.contains("verified: yes"), "{text}");
    let formula = text.lines().find_map(|l| l.strip_prefix("formula: ")).unwrap();
    assert_eq!(stdout(&gradedwl(["check", p(&m), "--point", "1", formula])), "true\n");
    assert_eq!(stdout(&gradedwl(["check", p(&m), "--point", "2", formula])), "false\n");
}

#[test]
fn distinguish_rejects_vocabulary_mismatch() {
    let w = Workspace::new();
    let a = w.file("path.txt", PATH3);
    let b = w.file("star.txt", STAR);
    let o = gradedwl(["distinguish", p(&a), "1", p(&b), "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_reports_acceptance_round_or_budget() {
    let w = Workspace::new();
    let m = w.file("star.txt", STAR);
    let always = w.file("always.txt", ALWAYS);
    let never = w.file("never.txt", NEVER);
    let some = w.file("some.txt", SOME_SUCCESSOR_P0);
    let o = gradedwl(["run", p(&always), p(&m), "--point", "2"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "accepted_at: 0\n".to_string()));
    let o = gradedwl(["run", p(&never), p(&m), "--point", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not_accepted_within_budget\n"));
    let o = gradedwl(["run", p(&some), p(&m), "--point", "1"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "accepted_at: 1\n".to_string()));
}

#[test]
fn table_automaton_matches_check_on_a_grid() {
    let w = Workspace::new();
    let some = w.file("some.txt", SOME_SUCCESSOR_P0);
    let dir = w.dir.path().join("grid");
    fs::create_dir(&dir).unwrap();
    let o = gradedwl(["grid", "--props", "1", "--max-nodes", "4", "--count", "10", "--seed", "3", "--out", p(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let mut models: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    models.sort();
    assert_eq!(models.len(), 10);
    for m in &models {
        let text = fs::read_to_string(m).unwrap();
        let nodes: Vec<String> =
            text.lines().find_map(|l| l.strip_prefix("nodes")).unwrap().split_whitespace().map(String::from).collect();
        for n in nodes {
            let expected = gradedwl(["check", p(m), "--point", &n, "<1:1>p0"]).status.code();
            let got = gradedwl(["run", p(&some), p(m), "--point", &n]).status.code();
            assert_eq!(expected, got, "{} node {n}", m.display());
        }
    }
}

#[test]
fn formula_to_automaton_reproduces_check() {
    let w = Workspace::new();
    let o = gradedwl(["translate", "f2a", "--formula", "<1:2>p0", "--props", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let a = w.file("a.txt", &stdout(&o));
    let grid = stdout(&gradedwl(["grid", "--props", "1", "--max-nodes", "4", "--count", "6", "--seed", "11"]));
    for (i, doc) in grid.split("\n\n").enumerate() {
        let m = w.file(&format!("m{i}.txt"), doc);
        let nodes: Vec<String> =
            doc.lines().find_map(|l| l.strip_prefix("nodes")).unwrap().split_whitespace().map(String::from).collect();
        for n in nodes {
            let expected = gradedwl(["check", p(&m), "--point", &n, "<1:2>p0"]).status.code();
            let got = gradedwl(["run", p(&a), p(&m), "--point", &n]).status.code();
            assert_eq!(expected, got, "model {i} node {n}");
        }
    }
}

#[test]
fn automaton_to_formulas_on_a_never_accepting_automaton() {
    let w = Workspace::new();
    let never = w.file("never.txt", NEVER);
    let o = gradedwl(["translate", "a2f", p(&never)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget-reached"));
}

#[test]
fn roundtrip_agrees_on_a_small_grid() {
    let o = gradedwl(["roundtrip", "--formula", "<1:1>p0", "--props", "1", "--max-nodes", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("disagreements: 0"));
}

#[test]
fn output_is_deterministic() {
    let w = Workspace::new();
    let m = w.file("c4.txt", CYCLE4);
    let runs = [
        vec!["refine", p(&m), "--trace"],
        vec!["grid", "--props", "1", "--max-nodes", "5", "--count", "20", "--seed", "7"],
        vec!["translate", "f2a", "--formula", "<1:1>p0", "--formula", "p0", "--props", "1", "--max-items", "30"],
    ];
    for args in runs {
        assert_eq!(gradedwl(&args).stdout, gradedwl(&args).stdout, "{args:?}");
    }
}

#[test]
fn single_node_grid_and_cap() {
    let o = gradedwl(["grid", "--props", "1", "--max-nodes", "1", "--max-degree", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("gradedwl-model v1").count(), 4);
    let o = gradedwl(["grid", "--max-nodes", "6", "--channels", "2"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn readme_examples() {
    let w = Workspace::new();
    let star = w.file("star.txt", STAR);
    let path = w.file("path.txt", PATH3);
    let c3 = w.file("c3.txt", CYCLE3);
    let c4 = w.file("c4.txt", CYCLE4);
    assert_eq!(stdout(&gradedwl(["type", p(&star), "--point", "1", "--depth", "1"])), "(d1 [~p0] (ch1 #2 (=2 (d0 [p0]))))\n");
    assert_eq!(
        stdout(&gradedwl(["refine", p(&path), "--stable"])),
        "round 2\nnode 1 color 3\nnode 2 color 4\nnode 3 color 3\nclasses: 2\nstable_at: 2\n"
    );
    assert_eq!(
        stdout(&gradedwl(["distinguish", p(&path), "1", p(&path), "2", "--oracle", "both", "--formula"])),
        "verdict: separated\nseparated_at: 1\nstages: 1\nsource: both\noracles_agree: yes\n\
         formula: (T & ((<1:1>T & ~<1:2>T) & (<1:1>T & ~<1:2>T)))\nverified: yes\n"
    );
    assert_eq!(
        stdout(&gradedwl(["distinguish", p(&c3), "1", p(&c4), "1", "--oracle", "both"])),
        "verdict: equivalent\nstable_at: 1\nstages: 0\nsource: both\noracles_agree: yes\n"
    );
    let a = w.file("a.txt", &stdout(&gradedwl(["translate", "f2a", "--formula", "<1:1>p0", "--props", "1", "--max-items", "5"])));
    assert_eq!(stdout(&gradedwl(["run", p(&a), p(&star), "--point", "1"])), "accepted_at: 1\n");

    let commented = w.file(
        "two.txt",
        "gradedwl-model v1\nprops 0 1          # proposition indices\nchannels 2\nnodes 0 1 2\n\
         edge 1 0 1         # channel, from, to\nedge 2 1 2\nval 0: 1 2         # nodes where p0 holds\n",
    );
    assert_eq!(stdout(&gradedwl(["check", p(&commented), "--point", "0", "<1:1>(p0 & <2:1>p0)"])), "true\n");
}

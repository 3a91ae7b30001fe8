//! Running one candidate program on one instance under a wall-clock limit.
//!
//! Each run gets a fresh temporary directory holding the program, the shim,
//! the instance payload and the (initially absent) output file. The child
//! runs in its own process group so the whole tree can be killed on timeout.

use std::fs;
use std::io::{self, Read};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::types::{CandidateProgram, InstanceRef};

const SHIM: &str = include_str!("../shim/run_candidate.py");

/// Exit code the shim uses when the candidate fails to load.
pub const LOAD_FAILURE_EXIT: i32 = 3;

/// Captured stdout/stderr are cut to this many trailing bytes.
pub const CAPTURE_LIMIT: usize = 64 * 1024;

const DIGEST_STDERR: usize = 2000;

const ENV_ALLOWLIST: &[&str] = &["PATH", "LANG", "LC_ALL", "LC_CTYPE", "TZ"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceLimits {
    pub cpu_cores: u32,
    pub timeout_s: f64,
    pub grace_s: f64,
    pub max_output_bytes: u64,
}

impl ResourceLimits {
    pub fn new(cpu_cores: u32, timeout_s: f64) -> Self {
        ResourceLimits {
            cpu_cores,
            timeout_s,
            grace_s: 2.0,
            max_output_bytes: 64 * 1024 * 1024,
        }
    }
}

/// Interpreter command template. Placeholders: `{shim}`, `{source}`,
/// `{input}`, `{output}`, `{workdir}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Runner {
    pub command: Vec<String>,
    pub keep_artifacts: bool,
}

impl Default for Runner {
    fn default() -> Self {
        Runner::from_template("python3 {shim} {source} {input} {output}")
    }
}

impl Runner {
    pub fn from_template(template: &str) -> Self {
        Runner {
            command: template.split_whitespace().map(str::to_string).collect(),
            keep_artifacts: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitState {
    Exited { code: i32 },
    Signaled { signal: i32 },
    TimedOut,
    LaunchFailure { message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum OutputState {
    Absent,
    Empty,
    Present { bytes: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionEvidence {
    pub exit: ExitState,
    pub stdout: String,
    pub stderr: String,
    pub wall_time_s: f64,
    /// State of the output file once the process tree is gone.
    pub output_state: OutputState,
    /// The output file existed when a non-zero exit or signal ended the run.
    pub output_created_before_crash: bool,
    /// File contents, unless absent or over the size cap.
    pub output: Option<Vec<u8>>,
    pub oversized: bool,
    pub cpu_cores: u32,
    /// Where the run directory was left when artifacts are kept.
    pub artifacts: Option<PathBuf>,
}

/// The reproducible part of the evidence stored in campaign logs. Wall time
/// is left out so identical runs serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDigest {
    pub exit: ExitState,
    pub output: OutputState,
    pub output_created_before_crash: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub stderr_tail: String,
}

impl ExecutionEvidence {
    pub fn digest(&self) -> EvidenceDigest {
        EvidenceDigest {
            exit: self.exit.clone(),
            output: self.output_state,
            output_created_before_crash: self.output_created_before_crash,
            stderr_tail: tail(&self.stderr, DIGEST_STDERR),
        }
    }

    pub fn crashed(&self) -> bool {
        matches!(self.exit, ExitState::Signaled { .. }) || matches!(self.exit, ExitState::Exited { code } if code != 0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecutorError {
    #[error("could not prepare the run directory: {0}")]
    Setup(#[from] io::Error),
    #[error("runner command template is empty")]
    EmptyCommand,
}

fn tail(s: &str, limit: usize) -> String {
    if s.len() <= limit {
        return s.to_string();
    }
    let mut cut = s.len() - limit;
    while !s.is_char_boundary(cut) {
        cut += 1;
    }
    format!("[... {cut} bytes cut]\n{}", &s[cut..])
}

fn read_capture(path: &Path, workdir: &str) -> String {
    let mut buf = Vec::new();
    if let Ok(mut f) = fs::File::open(path) {
        let len = f.metadata().map(|m| m.len()).unwrap_or(0);
        let skip = len.saturating_sub(CAPTURE_LIMIT as u64);
        if skip > 0 {
            let _ = io::copy(&mut (&mut f).take(skip), &mut io::sink());
        }
        let _ = f.read_to_end(&mut buf);
        let text = String::from_utf8_lossy(&buf).replace(workdir, "<workdir>");
        if skip > 0 {
            return format!("[... {skip} bytes cut]\n{text}");
        }
        return text;
    }
    String::new()
}

fn output_state(path: &Path) -> OutputState {
    match fs::metadata(path) {
        Ok(m) if m.len() == 0 => OutputState::Empty,
        Ok(m) => OutputState::Present { bytes: m.len() },
        Err(_) => OutputState::Absent,
    }
}

/// CPUs the child is pinned to: the first `n` CPUs this process may use.
fn affinity_mask(n: u32) -> Option<libc::cpu_set_t> {
    // SAFETY: cpu_set_t is plain data; the libc calls only read/write the set.
    unsafe {
        let mut allowed: libc::cpu_set_t = std::mem::zeroed();
        if libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut allowed) != 0 {
            return None;
        }
        let mut mask: libc::cpu_set_t = std::mem::zeroed();
        let mut taken = 0;
        for cpu in 0..libc::CPU_SETSIZE as usize {
            if taken == n {
                break;
            }
            if libc::CPU_ISSET(cpu, &allowed) {
                libc::CPU_SET(cpu, &mut mask);
                taken += 1;
            }
        }
        (taken > 0).then_some(mask)
    }
}

fn kill_group(pid: u32) {
    // SAFETY: signalling a process group we created; failure is harmless.
    unsafe {
        libc::kill(-(pid as i32), libc::SIGKILL);
    }
}

/// Run `program` on `instance`. Only harness-side problems are errors;
/// everything the candidate does ends up in the evidence.
pub fn execute_candidate(
    program: &CandidateProgram,
    instance: &InstanceRef,
    limits: &ResourceLimits,
    runner: &Runner,
) -> Result<ExecutionEvidence, ExecutorError> {
    if runner.command.is_empty() {
        return Err(ExecutorError::EmptyCommand);
    }
    let dir = tempfile::Builder::new().prefix("cobench-run-").tempdir()?;
    let root = dir.path();
    let workdir = root.to_string_lossy().into_owned();
    let shim = root.join("run_candidate.py");
    let source = root.join("candidate.py");
    let input = root.join(format!("input.{}", instance.problem.instance_extension()));
    let output = root.join("solution.txt");
    let (out_log, err_log) = (root.join("stdout.txt"), root.join("stderr.txt"));
    fs::write(&shim, SHIM)?;
    fs::write(&source, &program.source)?;
    fs::write(&input, &instance.payload)?;

    let subst = |arg: &str| {
        arg.replace("{shim}", &shim.to_string_lossy())
            .replace("{source}", &source.to_string_lossy())
            .replace("{input}", &input.to_string_lossy())
            .replace("{output}", &output.to_string_lossy())
            .replace("{workdir}", &workdir)
    };
    let args: Vec<String> = runner.command.iter().map(|a| subst(a)).collect();
    let mut cmd = Command::new(&args[0]);
    cmd.args(&args[1..])
        .current_dir(root)
        .env_clear()
        .stdin(Stdio::null())
        .stdout(fs::File::create(&out_log)?)
        .stderr(fs::File::create(&err_log)?)
        .process_group(0);
    for key in ENV_ALLOWLIST {
        if let Ok(v) = std::env::var(key) {
            cmd.env(key, v);
        }
    }
    cmd.env("HOME", root).env("TMPDIR", root).env("PYTHONHASHSEED", "0");

    let mask = affinity_mask(limits.cpu_cores);
    // Output files past the cap are cut by the kernel (SIGXFSZ).
    let fsize = limits.max_output_bytes.saturating_add(1).max(CAPTURE_LIMIT as u64 * 4);
    // SAFETY: the closure only makes async-signal-safe syscalls.
    unsafe {
        cmd.pre_exec(move || {
            if let Some(m) = mask {
                libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &m);
            }
            let lim = libc::rlimit {
                rlim_cur: fsize as libc::rlim_t,
                rlim_max: fsize as libc::rlim_t,
            };
            libc::setrlimit(libc::RLIMIT_FSIZE, &lim);
            Ok(())
        });
    }

    let start = Instant::now();
    let exit = match cmd.spawn() {
        Err(e) => ExitState::LaunchFailure {
            message: format!("cannot launch `{}`: {e}", args[0]),
        },
        Ok(mut child) => {
            let deadline = Duration::from_secs_f64(limits.timeout_s);
            let pid = child.id();
            loop {
                if let Some(status) = child.try_wait()? {
                    // Take down anything the candidate left running.
                    kill_group(pid);
                    break match (status.code(), status.signal()) {
                        (Some(code), _) => ExitState::Exited { code },
                        (None, Some(sig)) => ExitState::Signaled { signal: sig },
                        (None, None) => ExitState::Signaled { signal: 0 },
                    };
                }
                if start.elapsed() >= deadline {
                    kill_group(pid);
                    child.wait()?;
                    break ExitState::TimedOut;
                }
                thread::sleep(Duration::from_millis(5));
            }
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();

    let state = output_state(&output);
    let oversized = matches!(state, OutputState::Present { bytes } if bytes > limits.max_output_bytes);
    let body = match state {
        OutputState::Present { .. } if !oversized => Some(fs::read(&output)?),
        OutputState::Empty => Some(Vec::new()),
        _ => None,
    };
    let mut stderr = read_capture(&err_log, &workdir);
    if let ExitState::LaunchFailure { message } = &exit {
        stderr.push_str(message);
    }
    let mut evidence = ExecutionEvidence {
        stdout: read_capture(&out_log, &workdir),
        stderr,
        wall_time_s,
        output_created_before_crash: false,
        output_state: state,
        output: body,
        oversized,
        cpu_cores: limits.cpu_cores,
        artifacts: None,
        exit,
    };
    evidence.output_created_before_crash = evidence.crashed() && state != OutputState::Absent;
    if runner.keep_artifacts {
        evidence.artifacts = Some(dir.keep());
    }
    Ok(evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ProblemId, Split};

    fn prog(src: &str) -> CandidateProgram {
        CandidateProgram {
            source: src.into(),
            iteration: 1,
            sample_index: 0,
        }
    }

    fn inst(payload: &[u8]) -> InstanceRef {
        InstanceRef {
            problem: ProblemId::OperatorScheduling,
            instance_id: "t".into(),
            split: Split::Demo,
            payload: payload.to_vec(),
        }
    }

    #[test]
    fn copies_input() {
        let payload = vec![b'x'; 1024];
        let src = "def solve(i, o):\n    open(o, 'wb').write(open(i, 'rb').read())\n";
        let e = execute_candidate(&prog(src), &inst(&payload), &ResourceLimits::new(1, 10.0), &Runner::default()).unwrap();
        assert_eq!(e.exit, ExitState::Exited { code: 0 });
        assert_eq!(e.output_state, OutputState::Present { bytes: 1024 });
        assert_eq!(e.output.as_deref(), Some(&payload[..]));
        assert!(e.wall_time_s < 10.0);
    }

    #[test]
    fn import_error_is_a_load_failure() {
        let src = "import definitely_not_a_module\n\ndef solve(i, o):\n    pass\n";
        let e = execute_candidate(&prog(src), &inst(b"{}"), &ResourceLimits::new(1, 10.0), &Runner::default()).unwrap();
        assert_eq!(e.exit, ExitState::Exited { code: LOAD_FAILURE_EXIT });
        assert_eq!(e.output_state, OutputState::Absent);
        assert!(e.stderr.contains("ModuleNotFoundError"), "{}", e.stderr);
        assert!(e.stderr.contains("<workdir>/candidate.py"), "{}", e.stderr);
    }

    #[test]
    fn timeout_kills_process_tree() {
        let src = "import subprocess, time\n\ndef solve(i, o):\n    subprocess.Popen(['sleep', '30'])\n    time.sleep(30)\n";
        let lim = ResourceLimits::new(1, 0.5);
        let e = execute_candidate(&prog(src), &inst(b"{}"), &lim, &Runner::default()).unwrap();
        assert_eq!(e.exit, ExitState::TimedOut);
        assert!(e.wall_time_s <= lim.timeout_s + lim.grace_s);
    }

    #[test]
    fn crash_after_output_is_noted() {
        let src = "def solve(i, o):\n    open(o, 'w').write('x')\n    raise RuntimeError('late')\n";
        let e = execute_candidate(&prog(src), &inst(b"{}"), &ResourceLimits::new(1, 10.0), &Runner::default()).unwrap();
        assert_eq!(e.exit, ExitState::Exited { code: 1 });
        assert!(e.output_created_before_crash);
    }

    #[test]
    fn missing_interpreter_is_a_launch_failure() {
        let runner = Runner::from_template("/nonexistent/python {shim} {source} {input} {output}");
        let e = execute_candidate(&prog("def solve(i, o): pass\n"), &inst(b"{}"), &ResourceLimits::new(1, 5.0), &runner).unwrap();
        assert!(matches!(e.exit, ExitState::LaunchFailure { .. }));
        assert!(!e.stderr.is_empty());
    }

    #[test]
    fn environment_is_scrubbed() {
        std::env::set_var("COBENCH_TEST_SECRET", "s3cr3t");
        let src = "import os\n\ndef solve(i, o):\n    open(o, 'w').write(os.environ.get('COBENCH_TEST_SECRET', 'none') + ' ' + os.environ['PYTHONHASHSEED'])\n";
        let e = execute_candidate(&prog(src), &inst(b"{}"), &ResourceLimits::new(1, 10.0), &Runner::default()).unwrap();
        assert_eq!(e.output.as_deref(), Some(&b"none 0"[..]));
    }

    #[test]
    fn oversized_output_is_flagged() {
        let src = "def solve(i, o):\n    open(o, 'w').write('x' * 300000)\n";
        let mut lim = ResourceLimits::new(1, 10.0);
        lim.max_output_bytes = 1000;
        let e = execute_candidate(&prog(src), &inst(b"{}"), &lim, &Runner::default()).unwrap();
        assert!(e.oversized);
        assert!(e.output.is_none());
    }

    #[test]
    fn artifacts_can_be_kept() {
        let runner = Runner {
            keep_artifacts: true,
            ..Runner::default()
        };
        let e = execute_candidate(&prog("def solve(i, o): pass\n"), &inst(b"{}"), &ResourceLimits::new(1, 5.0), &runner).unwrap();
        let dir = e.artifacts.unwrap();
        assert!(dir.join("candidate.py").exists());
        fs::remove_dir_all(dir).unwrap();
    }
}

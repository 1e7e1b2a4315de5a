"""Monte-Carlo harness: BPSK over AWGN, seeded frame streams, paired runs.

Every frame owns a counter-derived RNG stream (master seed jumped by the
frame index), with the payload drawn before the noise. Results are therefore
bit-exact functions of (spec, seed): chunking and worker count never change
the outcome, and two runs with the same seed see identical payloads and
noise, which is what the paired comparisons rely on.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .code import PolarCode, encode, extract_info, map_payload
from .rlld import RlldDecoder
from .sc import ml_ssc_decode, sc_decode, ssc_decode
from .scl import CaSclDecoder

ALGORITHMS = ("sc", "ssc", "mlssc", "cascl", "rlld-lmld", "rlld-slmld")

# stand-in LLR magnitude for the sigma -> 0 limit
NOISELESS_LLR = 1000.0


@dataclass(frozen=True)
class ChannelConfig:
    """BPSK/AWGN operating point; SNR is Eb/N0 in dB, rate counts CRC bits."""

    ebn0_db: float
    rate: float

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))


@dataclass
class RunSpec:
    """One decoder configuration over an SNR grid."""

    code: PolarCode
    algo: str = "cascl"
    list_size: int = 4
    w_t: int = 32
    w_ml: int = 16
    ebn0_db: tuple[float, ...] = (2.0,)
    max_frames: int = 1_000_000
    max_errors: int = 200
    seed: int = 0
    noiseless: bool = False
    workers: int = 1
    chunk: int = 512
    label: str = ""

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        self.ebn0_db = tuple(float(s) for s in np.atleast_1d(self.ebn0_db))
        if not self.label:
            self.label = self.algo


@dataclass
class PointResult:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    fer_ci95: float
    seed: int
    elapsed_s: float = 0.0


@dataclass
class RunResult:
    algo: str
    points: list[PointResult]
    wall_s: float = 0.0


@dataclass
class PairedPoint:
    """Per-SNR outcomes of several decoders on identical noise."""

    ebn0_db: float
    frames: int
    frame_errors: tuple[int, ...]
    bit_errors: tuple[int, ...]
    fer: tuple[float, ...]
    ber: tuple[float, ...]
    fer_ci95: tuple[float, ...]


@dataclass
class PairedResult:
    algos: tuple[str, ...]
    points: list[PairedPoint]
    seed: int = 0
    wall_s: float = 0.0


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Independent stream for one frame index."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(frame))


def fer_ci95(errors: int, frames: int) -> float:
    """Normal-approximation 95% half width of the frame error rate."""
    if frames <= 0:
        return 0.0
    p = errors / frames
    return 1.96 * sqrt(max(p * (1.0 - p), 0.0) / frames)


class _FrameDecoder:
    """Uniform payload-out interface over the decoder families."""

    def __init__(self, spec: RunSpec):
        code = spec.code
        self.code = code
        self.algo = spec.algo
        self.batched = spec.algo in ("sc", "ssc", "mlssc")
        if spec.algo == "cascl":
            self._list = CaSclDecoder(code, spec.list_size)
        elif spec.algo.startswith("rlld"):
            mode = spec.algo.split("-", 1)[1]
            self._list = RlldDecoder(code, spec.list_size, spec.w_t, spec.w_ml,
                                     mode=mode)
        else:
            self._list = None

    def payloads(self, llrs: np.ndarray) -> np.ndarray:
        """Decode a (B, N) LLR block to (B, payload_len) bits."""
        code = self.code
        if self.batched:
            if self.algo == "sc":
                u, _ = sc_decode(code, llrs)
            elif self.algo == "ssc":
                u, _ = ssc_decode(code, llrs)
            else:
                u, _ = ml_ssc_decode(code, llrs)
            return extract_info(code, u)[:, : code.payload_len]
        out = np.empty((llrs.shape[0], code.payload_len), dtype=np.int8)
        for i in range(llrs.shape[0]):
            out[i] = self._list.decode(llrs[i]).payload
        return out


_decoder_cache: dict[tuple, _FrameDecoder] = {}


def _cached_decoder(spec: RunSpec) -> _FrameDecoder:
    code = spec.code
    key = (spec.algo, spec.list_size, spec.w_t, spec.w_ml, code.n,
           code.frozen.tobytes(), code.crc)
    dec = _decoder_cache.get(key)
    if dec is None:
        dec = _FrameDecoder(spec)
        _decoder_cache[key] = dec
    return dec


def _gen_block(code: PolarCode, sigma2: float | None, seed: int,
               start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Payloads and channel LLRs for frames [start, start + count)."""
    payloads = np.empty((count, code.payload_len), dtype=np.int8)
    llrs = np.empty((count, code.block_len))
    for i in range(count):
        rng = frame_rng(seed, start + i)
        payloads[i] = rng.integers(0, 2, code.payload_len, dtype=np.int8)
        x = encode(code, map_payload(code, payloads[i]), validate=False)
        symbols = 1.0 - 2.0 * x.astype(np.float64)
        if sigma2 is None:
            llrs[i] = NOISELESS_LLR * symbols
        else:
            y = symbols + rng.normal(scale=sqrt(sigma2), size=code.block_len)
            llrs[i] = 2.0 * y / sigma2
    return payloads, llrs


def _block_worker(specs: tuple[RunSpec, ...], ebn0_db: float, start: int,
                  count: int) -> tuple[np.ndarray, np.ndarray]:
    """Error flags and bit errors per decoder for one block of frames."""
    base = specs[0]
    code = base.code
    sigma2 = None
    if not base.noiseless:
        sigma2 = ChannelConfig(ebn0_db, code.k / code.block_len).sigma2
    payloads, llrs = _gen_block(code, sigma2, base.seed, start, count)
    flags = np.zeros((len(specs), count), dtype=bool)
    bit_errs = np.zeros((len(specs), count), dtype=np.int64)
    for d, spec in enumerate(specs):
        guesses = _cached_decoder(spec).payloads(llrs)
        diff = guesses != payloads
        bit_errs[d] = diff.sum(axis=1)
        flags[d] = bit_errs[d] > 0
    return flags, bit_errs


def _run_point(specs: tuple[RunSpec, ...], ebn0_db: float):
    """Frames, per-decoder error flags and bit errors at one SNR.

    Stops once every decoder has max_errors frame errors, or at max_frames.
    The stop frame is found by scanning flags in frame order, so the result
    does not depend on chunking or the worker pool.
    """
    base = specs[0]
    flags_parts: list[np.ndarray] = []
    bits_parts: list[np.ndarray] = []
    done_frames = 0

    def finished() -> int | None:
        """Frame count to truncate to, or None to continue."""
        if not flags_parts:
            return None
        flags = np.concatenate(flags_parts, axis=1)
        worst = None
        for d in range(flags.shape[0]):
            hits = np.flatnonzero(flags[d])
            if hits.size < base.max_errors:
                worst = None
                break
            cut = int(hits[base.max_errors - 1]) + 1
            worst = cut if worst is None else max(worst, cut)
        if worst is not None:
            return min(worst, base.max_frames)
        if done_frames >= base.max_frames:
            return base.max_frames
        return None

    def consume(result) -> int | None:
        nonlocal done_frames
        flags, bits = result
        flags_parts.append(flags)
        bits_parts.append(bits)
        done_frames += flags.shape[1]
        return finished()

    cut = None
    if base.workers <= 1:
        start = 0
        while cut is None and start < base.max_frames:
            count = min(base.chunk, base.max_frames - start)
            cut = consume(_block_worker(specs, ebn0_db, start, count))
            start += count
    else:
        with ProcessPoolExecutor(max_workers=base.workers) as pool:
            pending = []
            start = 0
            while cut is None:
                while (len(pending) < base.workers + 2
                       and start < base.max_frames):
                    count = min(base.chunk, base.max_frames - start)
                    pending.append(pool.submit(_block_worker, specs, ebn0_db,
                                               start, count))
                    start += count
                if not pending:
                    break
                cut = consume(pending.pop(0).result())
            for fut in pending:
                fut.cancel()
    if cut is None:
        cut = min(done_frames, base.max_frames)
    flags = np.concatenate(flags_parts, axis=1)[:, :cut]
    bits = np.concatenate(bits_parts, axis=1)[:, :cut]
    return cut, flags.sum(axis=1), bits.sum(axis=1)


def simulate(spec: RunSpec) -> RunResult:
    """Run one decoder over its SNR grid with early stopping."""
    t0 = time.perf_counter()
    points = []
    payload_len = spec.code.payload_len
    for snr in spec.ebn0_db:
        tp = time.perf_counter()
        frames, errs, bits = _run_point((spec,), snr)
        fer = errs[0] / frames if frames else 0.0
        ber = bits[0] / (frames * payload_len) if frames else 0.0
        points.append(PointResult(snr, frames, int(errs[0]), int(bits[0]),
                                  fer, ber, fer_ci95(int(errs[0]), frames),
                                  spec.seed, time.perf_counter() - tp))
    return RunResult(spec.algo, points, time.perf_counter() - t0)


def compare_paired(*specs: RunSpec) -> PairedResult:
    """Run several decoders against identical payloads and noise.

    All specs must share the code, SNR grid, seed, and stopping rule; the
    stop applies when every decoder has reached max_errors.
    """
    if len(specs) < 2:
        raise ValueError("need at least two configurations to pair")
    base = specs[0]
    for other in specs[1:]:
        same = (other.code.frozen.tobytes() == base.code.frozen.tobytes()
                and other.ebn0_db == base.ebn0_db
                and other.seed == base.seed
                and other.max_frames == base.max_frames
                and other.max_errors == base.max_errors
                and other.noiseless == base.noiseless)
        if not same:
            raise ValueError("paired runs must share code, grid, seed, and stops")
    t0 = time.perf_counter()
    payload_len = base.code.payload_len
    points = []
    for snr in base.ebn0_db:
        frames, errs, bits = _run_point(tuple(specs), snr)
        denom = frames * payload_len if frames else 1
        points.append(PairedPoint(
            snr, frames,
            tuple(int(e) for e in errs),
            tuple(int(b) for b in bits),
            tuple(e / frames if frames else 0.0 for e in errs),
            tuple(b / denom for b in bits),
            tuple(fer_ci95(int(e), frames) for e in errs),
        ))
    return PairedResult(tuple(s.label for s in specs), points, base.seed,
                        time.perf_counter() - t0)


_CSV_FIELDS = ("ebn0_db", "frames", "frame_errors", "fer", "fer_ci95", "ber", "seed")


def emit(result: RunResult, stream=None, fmt: str = "csv") -> str:
    """Serialize a run, one row per SNR point, in a stable column order."""
    rows = [{
        "ebn0_db": p.ebn0_db,
        "frames": p.frames,
        "frame_errors": p.frame_errors,
        "fer": p.fer,
        "fer_ci95": p.fer_ci95,
        "ber": p.ber,
        "seed": p.seed,
    } for p in result.points]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if stream is None:
        stream = sys.stdout
    stream.write(text)
    return text

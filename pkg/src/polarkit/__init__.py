"""Polar coding toolkit: construction, encoders, SC-family and list
decoders, a node-schedule reduced-latency list decoder, a cycle-count
model, and a seeded Monte-Carlo harness."""

from .code import (PolarCode, bit_reversal, constituent_codebook,
                   construct_code, encode, extract_info, load_code,
                   map_payload, polar_transform, save_code)
from .construction import bhattacharyya_profile, frozen_mask, ga_profile
from .crc import (CRC_PRESETS, CrcConfig, attach_crc, check_crc, crc_bits,
                  crc_bytes, get_crc)
from .latency import (ArchParams, CycleReport, baseline_cycles,
                      cycles_from_counts, rlld_cycles)
from .rlld import (RlldDecoder, decode_t0, llr_comp, lmld_expand,
                   node_metrics, psum_comp, rlld_decode, slmld_expand)
from .sc import (combine, f_min_sum, g_update, hard_decision, ml_node_decode,
                 ml_ssc_decode, sc_decode, ssc_decode)
from .scl import (CaSclDecoder, DecodeResult, ListState, assign_slots,
                  bit_metric_update, ca_scl_decode, expand_and_prune)
from .sim import (ALGORITHMS, ChannelConfig, PairedResult, PointResult,
                  RunResult, RunSpec, compare_paired, emit, fer_ci95,
                  frame_rng, simulate)
from .sorter import (MetricRecord, bbs_2l_l, bitonic_bbs_2l_l, block_reduce,
                     min2, topk_stable)
from .tree import (Action, CodeTree, TreeNode, boundary_layers, build_tree,
                   dump_tree, prune_and_label, schedule, split_rate1,
                   to_dot, validate_tree)

__version__ = "0.1.0"

"""Monte-Carlo channel simulator validating the closed-form estimation quality
and every SINR term by sampling Rayleigh fading, MMSE estimation and MR combining."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .pilots import PilotAssignment, pilot_gram
from .se_model import SystemParams, sinr_terms


@dataclass
class ChannelSample:
    h: np.ndarray        # (n, M, T, A) small-scale coefficients, CN(0, 1)
    g: np.ndarray        # (n, M, T, A) channels beta^(1/2) h
    g_hat: np.ndarray    # (n, M, T, A) MMSE estimates from simulated pilot reception
    n: np.ndarray        # (n, M, L_p, A) pilot-phase noise projections


@dataclass
class EmpiricalTerms:
    signal_hat: np.ndarray
    pilot_contam_hat: np.ndarray
    bu_hat: np.ndarray
    noise_hat: np.ndarray
    signal_se: np.ndarray
    pilot_contam_se: np.ndarray
    bu_se: np.ndarray
    noise_se: np.ndarray


def _crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0,1): two independent real normals scaled by 1/sqrt(2) per component."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_channel_sample(beta, assignment: PilotAssignment, antennas: int,
                        n_samples: int, rng: np.random.Generator) -> ChannelSample:
    """Simulate pilot reception and per-link MMSE estimation for n_samples blocks."""
    beta = np.asarray(beta, dtype=float)
    num_aps, num_ues = beta.shape
    pl = assignment.pilot_snr * assignment.num_pilots
    gram = pilot_gram(assignment)
    h = _crandn(rng, (n_samples, num_aps, num_ues, antennas))
    g = np.sqrt(beta)[None, :, :, None] * h
    noise = _crandn(rng, (n_samples, num_aps, assignment.num_pilots, antennas))
    onehot = np.zeros((num_ues, assignment.num_pilots))
    onehot[np.arange(num_ues), assignment.pilot_of] = 1.0
    # Projection of the received pilot block onto each pilot sequence.
    copilot_sum = np.einsum("nmta,tp->nmpa", g, onehot)
    projected = np.sqrt(pl) * copilot_sum + noise
    scale = np.sqrt(pl) * beta / (pl * (beta @ gram) + 1.0)
    g_hat = scale[None, :, :, None] * projected[:, :, assignment.pilot_of, :]
    return ChannelSample(h=h, g=g, g_hat=g_hat, n=noise)


def sample_estimates(beta, assignment: PilotAssignment, antennas: int, n_samples: int,
                     rng: np.random.Generator, chunk_size: int = 20000):
    """Empirical estimation quality: sample mean of ||g_hat||^2 / A per link.

    Returns (gamma_hat, stderr), both (M, T).
    """
    beta = np.asarray(beta, dtype=float)
    total = np.zeros(beta.shape)
    total_sq = np.zeros(beta.shape)
    done = 0
    while done < n_samples:
        n = min(chunk_size, n_samples - done)
        sample = draw_channel_sample(beta, assignment, antennas, n, rng)
        s = (np.abs(sample.g_hat) ** 2).sum(axis=-1) / antennas   # (n, M, T)
        total += s.sum(axis=0)
        total_sq += (s ** 2).sum(axis=0)
        done += n
    mean = total / n_samples
    var = np.maximum(total_sq / n_samples - mean ** 2, 0.0)
    return mean, np.sqrt(var / n_samples)


def _terms_from_moments(z_sum, z_sq_sum, w_sq_sum, n, eta, pu):
    z_mean = z_sum / n
    second = z_sq_sum / n
    var = np.maximum(second - np.abs(z_mean) ** 2, 0.0)
    coherent = np.maximum(np.abs(z_mean) ** 2 - var / n, 0.0)  # bias-corrected
    weights = pu * np.asarray(eta, dtype=float)
    num_ues = z_mean.shape[0]
    off = 1.0 - np.eye(num_ues)
    signal = weights * np.diag(coherent)
    pilot_contam = (off * coherent) @ weights
    bu = (var * (n / max(n - 1, 1))) @ weights
    noise = w_sq_sum / n
    return signal, pilot_contam, bu, noise


def empirical_sinr_terms(eta, d_binary, beta, assignment: PilotAssignment,
                         params: SystemParams, n_samples: int, rng: np.random.Generator,
                         chunk_size: int = 5000) -> EmpiricalTerms:
    """Sample means of the four SINR terms from simulated uplink reception.

    Per sample, the CPU combination sum_m v_mt^H y_m decomposes (over the data
    symbols, whose unit second moment is taken in closed form) into a coherent
    part per transmitting UE, its fluctuation, and the noise projection; the
    coherent co-pilot parts give pilot contamination, the fluctuations give
    beamforming-gain uncertainty. Standard errors come from per-chunk estimates.
    """
    d = np.asarray(d_binary, dtype=float)
    if not np.all((d == 0.0) | (d == 1.0)):
        raise ValueError("the Monte-Carlo oracle requires a binary association matrix")
    if np.any(d.sum(axis=0) <= 0):
        raise ValueError("all-zero association column")
    beta = np.asarray(beta, dtype=float)
    num_ues = beta.shape[1]
    antennas = params.antennas_per_ap
    pu = params.uplink_snr
    z_sum = np.zeros((num_ues, num_ues), dtype=complex)
    z_sq_sum = np.zeros((num_ues, num_ues))
    w_sq_sum = np.zeros(num_ues)
    chunk_terms = []
    done = 0
    while done < n_samples:
        n = min(chunk_size, n_samples - done)
        sample = draw_channel_sample(beta, assignment, antennas, n, rng)
        combiner = np.conj(sample.g_hat) * d[None, :, :, None]
        z = np.einsum("nmta,nmsa->nts", combiner, sample.g)
        data_noise = _crandn(rng, (n, beta.shape[0], antennas))
        w = np.einsum("nmta,nma->nt", combiner, data_noise)
        cz = z.sum(axis=0)
        cz2 = (np.abs(z) ** 2).sum(axis=0)
        cw2 = (np.abs(w) ** 2).sum(axis=0)
        z_sum += cz
        z_sq_sum += cz2
        w_sq_sum += cw2
        chunk_terms.append(_terms_from_moments(cz, cz2, cw2, n, eta, pu))
        done += n
    signal, pc, bu, noise = _terms_from_moments(z_sum, z_sq_sum, w_sq_sum,
                                                n_samples, eta, pu)
    stacked = [np.stack([c[i] for c in chunk_terms]) for i in range(4)]
    n_chunks = len(chunk_terms)
    ses = [s.std(axis=0, ddof=1) / np.sqrt(n_chunks) if n_chunks > 1
           else np.full(num_ues, np.inf) for s in stacked]
    return EmpiricalTerms(signal_hat=signal, pilot_contam_hat=pc, bu_hat=bu,
                          noise_hat=noise, signal_se=ses[0], pilot_contam_se=ses[1],
                          bu_se=ses[2], noise_se=ses[3])


def comparison_table(eta, d_binary, gamma, beta, gram, params: SystemParams,
                     emp: EmpiricalTerms):
    """Rows (ue, term, closed_form, empirical, stderr, z_score) for all UEs and terms."""
    closed = sinr_terms(eta, d_binary, gamma, beta, gram, params)
    names = ("signal", "pilot_contamination", "beamforming_uncertainty", "noise")
    emp_vals = (emp.signal_hat, emp.pilot_contam_hat, emp.bu_hat, emp.noise_hat)
    emp_ses = (emp.signal_se, emp.pilot_contam_se, emp.bu_se, emp.noise_se)
    rows = []
    for t in range(np.asarray(gamma).shape[1]):
        for name, cl, ev, se_ in zip(names, closed, emp_vals, emp_ses):
            z = (ev[t] - cl[t]) / se_[t] if se_[t] > 0 else np.inf
            rows.append({"ue": t, "term": name, "closed_form": float(cl[t]),
                         "empirical": float(ev[t]), "stderr": float(se_[t]),
                         "z_score": float(z)})
    return rows


def save_comparison_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["ue", "term", "closed_form",
                                                "empirical", "stderr", "z_score"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v)
                             for k, v in row.items()})

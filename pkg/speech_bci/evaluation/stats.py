"""통계 검정 모듈.

평균/표본 표준편차, 대응 t-검정, Bonferroni 보정, Shapiro-Wilk(AS R94), Levene 검정을 제공해요.
t/F 꼬리 확률은 정규화 불완전 베타 함수(scipy.special.betainc)로 계산해요.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from math import asin, exp, log, pi, sqrt

import numpy as np
from scipy import special

from speech_bci.errors import DegenerateDataError, InsufficientDataError, InvalidParameterError, UnsupportedSizeError

SHAPIRO_MIN_N = 3
SHAPIRO_MAX_N = 5000

# AS R94 다항식 계수
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: int


@dataclass(frozen=True)
class ShapiroResult:
    w: float
    p: float


@dataclass(frozen=True)
class LeveneResult:
    f: float
    p: float
    df: tuple[int, int]


def _vector(values: Sequence[float] | np.ndarray) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InvalidParameterError("values must be finite")
    return x


def mean_std(values: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """평균과 표본 표준편차(분모 n−1)를 반환해요.

    Raises:
        InsufficientDataError: 값이 2개 미만일 때
    """
    x = _vector(values)
    if x.size < 2:
        raise InsufficientDataError(f"sample standard deviation needs >= 2 values, got {x.size}")
    return float(x.mean()), float(x.std(ddof=1))


def t_sf_two_sided(t: float, df: float) -> float:
    """자유도 df인 t 분포의 양측 꼬리 확률 I_{df/(df+t²)}(df/2, 1/2)."""
    return float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))


def f_sf(f: float, df1: float, df2: float) -> float:
    """F(df1, df2) 분포의 상측 꼬리 확률 I_{df2/(df2+df1·F)}(df2/2, df1/2)."""
    if f <= 0:
        return 1.0
    return float(special.betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))


def paired_t_test(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> TTestResult:
    """대응 표본 t-검정 (양측).

    Raises:
        InvalidParameterError: 길이가 다르거나 2 미만일 때
        DegenerateDataError: 차이의 분산이 0일 때
    """
    x, y = _vector(a), _vector(b)
    if x.size != y.size:
        raise InvalidParameterError(f"paired samples need equal lengths, got {x.size} and {y.size}")
    if x.size < 2:
        raise InsufficientDataError("paired t-test needs >= 2 pairs")
    d = x - y
    if np.ptp(d) == 0:
        raise DegenerateDataError("differences have zero variance")
    n = d.size
    t = d.mean() / (d.std(ddof=1) / sqrt(n))
    df = n - 1
    return TTestResult(t=float(t), p=t_sf_two_sided(float(t), df), df=df)


def bonferroni(p_values: Sequence[float] | np.ndarray, m: int | None = None) -> np.ndarray:
    """adjusted_i = min(1, m · p_i).

    Args:
        p_values (Sequence[float] | np.ndarray): 원래 p 값
        m (int | None): 비교 횟수 (None이면 p 값 개수)
    """
    p = np.asarray(p_values, dtype=np.float64).reshape(-1)
    if p.size < 1:
        raise InvalidParameterError("at least one p-value is required")
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidParameterError("p-values must lie in [0, 1]")
    m = p.size if m is None else m
    if m < p.size:
        raise InvalidParameterError(f"family size m={m} is smaller than the number of p-values ({p.size})")
    return np.minimum(1.0, m * p)


def _poly(coefs: Sequence[float], x: float) -> float:
    result = 0.0
    for c in reversed(coefs):
        result = result * x + c
    return result


def shapiro_coefficients(n: int) -> np.ndarray:
    """AS R94 하위 절반 계수 a_1..a_{n//2} (양수, 제곱합 1/2)."""
    n2 = n // 2
    if n == 3:
        return np.array([sqrt(0.5)])
    m = special.ndtri((np.arange(1, n2 + 1) - 0.375) / (n + 0.25))
    summ2 = 2.0 * float(np.sum(m * m))
    ssumm2 = sqrt(summ2)
    rsn = 1.0 / sqrt(n)
    a1 = _poly(_C1, rsn) - m[0] / ssumm2
    a = -m.copy()
    if n > 5:
        a2 = -m[1] / ssumm2 + _poly(_C2, rsn)
        fac = sqrt((summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2) / (1.0 - 2.0 * a1**2 - 2.0 * a2**2))
        a /= fac
        a[1] = a2
    else:
        fac = sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1**2))
        a /= fac
    a[0] = a1
    return a


def shapiro_wilk(values: Sequence[float] | np.ndarray) -> ShapiroResult:
    """Shapiro-Wilk 정규성 검정 (Royston AS R94, float64).

    Returns:
        ShapiroResult: W ∈ (0, 1]와 정규 근사 p 값

    Raises:
        UnsupportedSizeError: n이 [3, 5000] 밖일 때
        DegenerateDataError: 모든 값이 같을 때
    """
    x = np.sort(_vector(values))
    n = x.size
    if not SHAPIRO_MIN_N <= n <= SHAPIRO_MAX_N:
        raise UnsupportedSizeError(f"Shapiro-Wilk supports {SHAPIRO_MIN_N} <= n <= {SHAPIRO_MAX_N}, got {n}")
    spread = x[-1] - x[0]
    if spread <= 0:
        raise DegenerateDataError("Shapiro-Wilk needs a non-constant sample")

    half = shapiro_coefficients(n)
    coef = np.zeros(n)
    coef[: n // 2] = -half
    coef[n - n // 2 :] = half[::-1]
    z = (x - x.mean()) / spread
    w = float(np.dot(coef, z) ** 2 / (np.dot(coef, coef) * np.dot(z, z)))
    w = min(w, 1.0)

    if n == 3:
        p = 6.0 / pi * (asin(sqrt(w)) - asin(sqrt(0.75)))
        return ShapiroResult(w=w, p=float(min(max(p, 0.0), 1.0)))

    w1 = log(1.0 - w) if w < 1.0 else -np.inf
    if n <= 11:
        gamma = _poly(_G, n)
        if w1 >= gamma:
            return ShapiroResult(w=w, p=1e-99)
        y = -log(gamma - w1)
        mu = _poly(_C3, n)
        sigma = exp(_poly(_C4, n))
    else:
        y = w1
        ln = log(n)
        mu = _poly(_C5, ln)
        sigma = exp(_poly(_C6, ln))
    p = float(special.ndtr(-(y - mu) / sigma))
    return ShapiroResult(w=w, p=p)


def levene(groups: Sequence[Sequence[float] | np.ndarray]) -> LeveneResult:
    """평균 중심 절대 편차를 쓰는 고전 Levene 등분산 검정.

    Raises:
        InsufficientDataError: 그룹이 2개 미만이거나 크기 2 미만 그룹이 있을 때
        DegenerateDataError: 그룹 내 편차 변동이 전부 0일 때
    """
    samples = [_vector(g) for g in groups]
    k = len(samples)
    if k < 2:
        raise InsufficientDataError("Levene's test needs >= 2 groups")
    if any(s.size < 2 for s in samples):
        raise InsufficientDataError("every Levene group needs >= 2 values")

    deviations = [np.abs(s - s.mean()) for s in samples]
    sizes = np.array([d.size for d in deviations], dtype=np.float64)
    n_total = sizes.sum()
    group_means = np.array([d.mean() for d in deviations])
    grand_mean = np.concatenate(deviations).mean()

    between = float(np.sum(sizes * (group_means - grand_mean) ** 2))
    within = float(sum(np.sum((d - d.mean()) ** 2) for d in deviations))
    if within <= 0:
        raise DegenerateDataError("absolute deviations have zero within-group variation")

    df1, df2 = k - 1, int(n_total) - k
    f = (df2 / df1) * between / within
    return LeveneResult(f=float(f), p=f_sf(f, df1, df2), df=(df1, df2))

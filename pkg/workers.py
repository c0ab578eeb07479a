"""
并行模块 - 有序线程池 map

    from workers import pool_map

    results = pool_map(compute, alphas)          # 线程数取 settings.threads
    results = pool_map(compute, alphas, workers=4)

结果按输入顺序返回; 随机数由 (seed, chunk) 决定, 与线程数无关。
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from config import settings

T = TypeVar("T")
R = TypeVar("R")


def pool_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """按顺序返回 fn(item); 任一任务抛出的异常原样向上传播"""
    items = list(items)
    count = max(1, workers if workers is not None else settings.threads)
    if count == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(count, len(items))) as pool:
        return list(pool.map(fn, items))

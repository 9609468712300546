from typing import Optional

from tqdm import tqdm

from ..config import Config


def step_bar(total: int, desc: str, config: Optional[Config] = None) -> tqdm:
    """Progress bar for time-stepping loops.

    Disabled unless ``DI_PROGRESS`` is set, so library calls stay silent by
    default and tests never draw bars.
    """
    config = config or Config()
    return tqdm(
        total=total,
        desc=desc,
        unit="steps",
        leave=False,
        ncols=100,
        disable=not config.SHOW_PROGRESS,
        bar_format="{l_bar}{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}, {rate_fmt}]",
    )

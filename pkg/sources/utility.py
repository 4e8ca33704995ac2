import os
import platform
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from dotenv import load_dotenv
from termcolor import colored

T = TypeVar("T")
R = TypeVar("R")

def get_color_map():
    color_map = {
        "success": "green",
        "failure": "red",
        "status": "light_green",
        "code": "light_blue",
        "warning": "yellow",
        "output": "cyan",
        "info": "cyan"
    }
    if platform.system().lower() == "windows":
        color_map["info"] = "black"
    return color_map

def pretty_print(text, color="info", no_newline=False):
    """
    Print text with color formatting.

    Args:
        text (str): The text to print
        color (str, optional): The color to use. Defaults to "info".
            Valid colors are:
            - "success": Green
            - "failure": Red
            - "status": Light green
            - "code": Light blue
            - "warning": Yellow
            - "output": Cyan
    """
    color_map = get_color_map()
    if color not in color_map:
        color = "info"
    print(colored(text, color_map[color]), end='' if no_newline else "\n")

def get_thread_count() -> int:
    """
    Number of worker threads for word-level work.
    Read from VERONESE_THREADS (environment or .env), defaults to 1.
    """
    load_dotenv()
    raw = os.getenv("VERONESE_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        return 1
    return max(1, count)

def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = None) -> List[R]:
    """
    Apply func to every item, possibly on several threads.
    Results are always returned in input order, so output does not depend on the thread count.
    """
    items = list(items)
    threads = threads or get_thread_count()
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))

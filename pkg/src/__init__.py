"""
Sato-Tate toolkit - endomorphism data, Sato-Tate groups and Frobenius statistics
for curves of genus 1 to 3.
"""

__version__ = "1.0.0"
__description__ = "Sato-Tate groups and moment statistics for low-genus curves"

__all__ = ["sato_tate"]

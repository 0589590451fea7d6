__title__ = "eigmax"
__description__ = "Maximal and next-to-maximal eigenpairs of matrices with nonnegative off-diagonals"
__url__ = "https://github.com/ThomasByr/eigmax"
__version__ = "0.1.1"
__author__ = "Thomas Byr"
__author_email__ = "thomas-c2000@outlook.com"
__license__ = "BSD 3-Clause"

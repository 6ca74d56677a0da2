# Circulant curvature source package
from loguru import logger

# Silent as a library; setup_logger enables output
logger.disable("src")

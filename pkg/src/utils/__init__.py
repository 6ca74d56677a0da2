# Utility modules 
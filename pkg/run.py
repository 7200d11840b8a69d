"""
Punto de entrada principal de ECGForge
"""
import logging

from config.settings import Config
from ecgforge.cli import main

# Configurar logging a partir de ECGFORGE_LOG_LEVEL
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

if __name__ == '__main__':
    main()

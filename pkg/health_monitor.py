"""
Health Monitor - Resource reporting for long computations
psutil snapshots and threshold alerts around enumeration and sampling jobs
"""

import logging
import os
from datetime import datetime
from typing import Dict, List, Optional

import psutil

logger = logging.getLogger(__name__)

LARGE_JOB = 1 << 20
MAX_ALERTS = 50


class ResourceMonitor:
    """Tracks CPU and memory use and raises alerts for heavy jobs"""

    def __init__(self, thresholds: Optional[Dict[str, float]] = None):
        self.alerts: List[Dict] = []
        self.jobs_checked = 0
        self.thresholds = {
            'system_cpu_max': 90.0,
            'system_memory_max': 85.0,
            'large_job_size': LARGE_JOB,
        }
        if thresholds:
            self.thresholds.update(thresholds)

    def check_enumeration(self, size: int, what: str = 'enumeration') -> bool:
        """Alert when a large job starts under memory pressure; True if no alert was raised"""
        self.jobs_checked += 1
        if size < self.thresholds['large_job_size']:
            return True
        metrics = self.get_system_metrics()
        logger.info(f"Starting large {what} of {size} items, memory at {metrics['memory_percent']:.1f}%")
        if metrics['memory_percent'] > self.thresholds['system_memory_max']:
            self._add_alert(f"{what} of {size} items started with memory at "
                            f"{metrics['memory_percent']:.1f}%", 'warning')
            return False
        if metrics['cpu_percent'] > self.thresholds['system_cpu_max']:
            self._add_alert(f"{what} of {size} items started with CPU at {metrics['cpu_percent']:.1f}%", 'info')
            return False
        return True

    def _add_alert(self, message: str, level: str):
        """Add a resource alert"""
        alert = {
            'timestamp': datetime.utcnow().isoformat(),
            'message': message,
            'level': level
        }
        self.alerts.append(alert)
        logger.log(
            logging.WARNING if level in ('error', 'warning') else logging.INFO,
            f"Resource Alert [{level.upper()}]: {message}"
        )
        if len(self.alerts) > MAX_ALERTS:
            self.alerts.pop(0)

    def get_system_metrics(self) -> Dict:
        """Get current system and process metrics"""
        try:
            return {
                'cpu_percent': psutil.cpu_percent(),
                'memory_percent': psutil.virtual_memory().percent,
                'process_rss_mb': psutil.Process(os.getpid()).memory_info().rss / 2**20,
                'load_average': list(os.getloadavg()) if hasattr(os, 'getloadavg') else [0, 0, 0]
            }
        except Exception as e:
            logger.error(f"Error getting system metrics: {e}")
            return {
                'cpu_percent': 0,
                'memory_percent': 0,
                'process_rss_mb': 0,
                'load_average': [0, 0, 0]
            }

    def get_health_status(self) -> Dict:
        return {
            'overall_health': 'good' if not self.alerts else 'warning',
            'jobs_checked': self.jobs_checked,
            'recent_alerts': self.alerts[-10:],
        }


resource_monitor = ResourceMonitor()
